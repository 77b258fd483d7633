#include "diffpair/labeling.hpp"

#include <algorithm>

namespace diffpair {

std::vector<std::size_t> PseudoLabelLedger::dp_prime() const {
    std::vector<std::size_t> out;
    for (const auto& e : d_unknown) out.push_back(e.pos_index);
    return out;
}

std::vector<std::size_t> PseudoLabelLedger::dn_prime() const {
    std::vector<std::size_t> out;
    for (const auto& e : d_known) out.push_back(e.neg_index);
    return out;
}

PseudoLabelLedger init_ledger(const std::vector<TrainView>& views, const PairBank& bank,
                              std::uint64_t seed) {
    PseudoLabelLedger led;
    led.rng = Rng(mix_seed(seed, 0x6c6564676572ULL));
    for (const auto& v : views) led.pool.push_back(v.id);
    for (std::size_t i = 0; i < bank.positives.size(); ++i) {
        led.dp.push_back(i);
        led.seed_pos[bank.positives[i].seed_id].push_back(i);
    }
    for (std::size_t i = 0; i < bank.negatives.size(); ++i) {
        led.dn.push_back(i);
        led.seed_neg[bank.negatives[i].seed_id].push_back(i);
    }
    return led;
}

Vec open_set_distribution(const ProbOutputs& probs) {
    std::size_t K = probs.p_binary.size();
    double p_other = 1.0;
    for (double p : probs.p_binary) p_other *= 1.0 - p;
    Vec q(K + 1);
    for (std::size_t j = 0; j < K; ++j) q[j] = (1.0 - p_other) * probs.p_closed[j];
    q[K] = p_other;
    return q;
}

Vec hybrid_distribution(const ProbOutputs& probs) {
    std::size_t K = probs.p_binary.size();
    Vec q(K + 1);
    double sum = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        q[j] = probs.p_closed[j] * probs.p_binary[j];
        sum += q[j];
    }
    q[K] = 1.0 - sum;
    return q;
}

namespace {

// Lowest index wins ties.
std::size_t argmax(const Vec& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

void erase_value(std::vector<std::size_t>& v, std::size_t value) {
    v.erase(std::remove(v.begin(), v.end(), value), v.end());
}

}  // namespace

SelectionReport assign_pseudo_labels(const ClassifierModel& model, PseudoLabelLedger& ledger,
                                     const PairBank& bank, const std::vector<TrainView>& views,
                                     const LabelingConfig& cfg) {
    cfg.validate();
    std::map<int, const Vec*> features;
    for (const auto& v : views) features[v.id] = v.features;
    int K = model.known;

    SelectionReport report;
    std::vector<int> remaining;
    for (int id : ledger.pool) {
        auto it = features.find(id);
        require(it != features.end(), "assign_pseudo_labels: pool id without features");
        ProbOutputs probs = forward(model, *it->second);
        Vec q = open_set_distribution(probs);
        Vec qt = hybrid_distribution(probs);
        std::size_t aq = argmax(q);
        std::size_t at = argmax(qt);
        if (aq != at || q[aq] < cfg.threshold || qt[at] < cfg.threshold) {
            remaining.push_back(id);
            continue;
        }
        int label = static_cast<int>(aq) + 1;
        report.selected.push_back({id, label, q[aq], qt[at]});

        if (label <= K) {
            const GeneratedInstance* neg = bank.find(Polarity::negative, id, label);
            require(neg != nullptr, "assign_pseudo_labels: no matching negative in bank");
            ledger.d_known.push_back(
                {id, label, static_cast<std::size_t>(neg - bank.negatives.data())});
        } else {
            int prompt = 1 + static_cast<int>(ledger.rng.below(static_cast<std::uint64_t>(K)));
            const GeneratedInstance* pos = bank.find(Polarity::positive, id, prompt);
            require(pos != nullptr, "assign_pseudo_labels: no matching positive in bank");
            ledger.d_unknown.push_back(
                {id, static_cast<std::size_t>(pos - bank.positives.data())});
        }
        // Every generated instance of a labeled seed leaves the pool sets;
        // only the selected counterpart keeps training (via the prime set).
        for (std::size_t idx : ledger.seed_pos[id]) erase_value(ledger.dp, idx);
        for (std::size_t idx : ledger.seed_neg[id]) erase_value(ledger.dn, idx);
        ledger.seed_pos.erase(id);
        ledger.seed_neg.erase(id);
    }
    ledger.pool = std::move(remaining);
    report.pool_after = static_cast<int>(ledger.pool.size());
    return report;
}

double total_loss(const ClassifierModel& model, const PseudoLabelLedger& ledger,
                  const PairBank& bank, const std::vector<TrainView>& views, double lambda1,
                  double lambda2) {
    std::map<int, const Vec*> features;
    for (const auto& v : views) features[v.id] = v.features;

    ExampleSet p1, n1, p2, n2, p3, n3;
    for (std::size_t idx : ledger.dp)
        p1.push_back({&bank.positives[idx].features, bank.positives[idx].prompt_class});
    for (std::size_t idx : ledger.dn)
        n1.push_back({&bank.negatives[idx].features, bank.negatives[idx].prompt_class});
    for (const auto& e : ledger.d_known) {
        p2.push_back({features.at(e.id), e.label});
        n2.push_back({&bank.negatives[e.neg_index].features,
                      bank.negatives[e.neg_index].prompt_class});
    }
    for (const auto& e : ledger.d_unknown) {
        int prompt = bank.positives[e.pos_index].prompt_class;
        p3.push_back({&bank.positives[e.pos_index].features, prompt});
        n3.push_back({features.at(e.id), prompt});
    }
    return loss_generated(model, p1, n1, lambda1, lambda2) +
           loss_generated(model, p2, n2, lambda1, lambda2) +
           loss_generated(model, p3, n3, lambda1, lambda2);
}

}  // namespace diffpair
