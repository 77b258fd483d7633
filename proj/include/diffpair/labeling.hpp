#pragma once

#include <map>

#include "diffpair/classifier.hpp"
#include "diffpair/diffusion.hpp"

namespace diffpair {

struct LabelingConfig {
    double threshold = 0.98;  // confidence floor for both q and q~
    int interval = 40;        // epochs between labeling rounds
    int rounds = 10;

    void validate() const {
        require(threshold > 0.0 && threshold <= 1.0, "labeling: threshold must be in (0,1]");
        require(interval >= 1 && rounds >= 0, "labeling: bad interval/rounds");
    }
};

struct KnownEntry {
    int id = 0;
    int label = 0;              // pseudo-label in 1..K
    std::size_t neg_index = 0;  // bank negative with matching (seed, label)
};

struct UnknownEntry {
    int id = 0;
    std::size_t pos_index = 0;  // bank positive with matching seed, random prompt
};

/// Evolving partition of the training pool plus the generated-instance
/// bookkeeping. pool / d_known ids / d_unknown ids stay pairwise disjoint and
/// always union to the original id set; dp/dn hold the bank indices still in
/// play for pool seeds.
struct PseudoLabelLedger {
    std::vector<int> pool;
    std::vector<KnownEntry> d_known;
    std::vector<UnknownEntry> d_unknown;
    std::vector<std::size_t> dp, dn;
    std::map<int, std::vector<std::size_t>> seed_pos, seed_neg;  // remaining, by seed id
    Rng rng{0};

    std::vector<std::size_t> dp_prime() const;
    std::vector<std::size_t> dn_prime() const;
};

PseudoLabelLedger init_ledger(const std::vector<TrainView>& views, const PairBank& bank,
                              std::uint64_t seed);

/// q_j = p(known|x) p^(j|x) for j <= K, q_{K+1} = prod_j (1 - p(j|x)).
Vec open_set_distribution(const ProbOutputs& probs);

/// q~_j = p^(j|x) p(j|x) for j <= K, q~_{K+1} = 1 - sum of the others.
Vec hybrid_distribution(const ProbOutputs& probs);

struct SelectionEntry {
    int id = 0;
    int label = 0;  // 1..K or K+1
    double max_q = 0.0;
    double max_q_tilde = 0.0;
};

struct SelectionReport {
    std::vector<SelectionEntry> selected;
    int pool_after = 0;
};

/// One confidence-based labeling pass over the pool (Algorithm-2 rule: both
/// distributions must agree on the argmax and both maxima must clear the
/// threshold). Mutates the ledger; a no-op report when nothing qualifies.
SelectionReport assign_pseudo_labels(const ClassifierModel& model, PseudoLabelLedger& ledger,
                                     const PairBank& bank, const std::vector<TrainView>& views,
                                     const LabelingConfig& cfg);

/// Sum of the three loss terms over (dp, dn), (d_known, dn_prime) and
/// (dp_prime, d_unknown). Empty sets contribute zero.
double total_loss(const ClassifierModel& model, const PseudoLabelLedger& ledger,
                  const PairBank& bank, const std::vector<TrainView>& views, double lambda1,
                  double lambda2);

}  // namespace diffpair
