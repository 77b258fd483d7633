#include "diffpair/metrics.hpp"

#include <cmath>

namespace diffpair {

namespace {

std::size_t argmax(const Vec& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

double evaluate_closed(const ClassifierModel& model, const std::vector<LabeledSample>& test) {
    long total = 0, correct = 0;
    for (const auto& s : test) {
        if (s.role != ClassRole::known) continue;
        ++total;
        ProbOutputs probs = forward(model, s.features);
        if (static_cast<int>(argmax(probs.p_closed)) + 1 == s.true_class) ++correct;
    }
    require(total > 0, "evaluate_closed: no known-role test samples");
    return static_cast<double>(correct) / static_cast<double>(total);
}

OpenAccuracies evaluate_open(const ClassifierModel& model, const std::vector<LabeledSample>& test) {
    long n_known = 0, n_unknown = 0, n_fresh = 0;
    long c_known = 0, c_unknown = 0, c_fresh = 0;
    int K = model.known;
    for (const auto& s : test) {
        Vec q = open_set_distribution(forward(model, s.features));
        int pred = static_cast<int>(argmax(q)) + 1;  // K+1 means "other"
        switch (s.role) {
            case ClassRole::known:
                ++n_known;
                if (pred == s.true_class) ++c_known;
                break;
            case ClassRole::unknown:
                ++n_unknown;
                if (pred == K + 1) ++c_unknown;
                break;
            case ClassRole::fresh:
                ++n_fresh;
                if (pred == K + 1) ++c_fresh;
                break;
        }
    }
    require(n_known > 0 && n_unknown > 0 && n_fresh > 0, "evaluate_open: a test role is missing");
    return {static_cast<double>(c_known) / n_known, static_cast<double>(c_unknown) / n_unknown,
            static_cast<double>(c_fresh) / n_fresh};
}

double balance_score(double known, double unknown, double fresh) {
    double mean = (known + unknown + fresh) / 3.0;
    double ss = (known - mean) * (known - mean) + (unknown - mean) * (unknown - mean) +
                (fresh - mean) * (fresh - mean);
    return mean - std::sqrt(ss / 2.0);
}

EvalReport evaluate(const ClassifierModel& model, const std::vector<LabeledSample>& test) {
    EvalReport r;
    r.closed_known_acc = evaluate_closed(model, test);
    OpenAccuracies open = evaluate_open(model, test);
    r.open_known_acc = open.known;
    r.open_unknown_acc = open.unknown;
    r.open_new_acc = open.fresh;
    r.balance = balance_score(open.known, open.unknown, open.fresh);
    return r;
}

}  // namespace diffpair
