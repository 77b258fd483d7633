#pragma once

#include "diffpair/labeling.hpp"
#include "diffpair/world.hpp"

namespace diffpair {

struct EvalReport {
    double closed_known_acc = 0.0;
    double open_known_acc = 0.0;
    double open_unknown_acc = 0.0;
    double open_new_acc = 0.0;
    double balance = 0.0;
};

/// K-way accuracy (argmax of the closed head) over known-role test samples.
double evaluate_closed(const ClassifierModel& model, const std::vector<LabeledSample>& test);

struct OpenAccuracies {
    double known = 0.0, unknown = 0.0, fresh = 0.0;
};

/// K+1-way accuracy by argmax of q: knowns must hit their class, unknown and
/// new samples must land in class K+1.
OpenAccuracies evaluate_open(const ClassifierModel& model, const std::vector<LabeledSample>& test);

/// Mean of the three accuracies minus their sample (n-1) standard deviation.
double balance_score(double known, double unknown, double fresh);

EvalReport evaluate(const ClassifierModel& model, const std::vector<LabeledSample>& test);

}  // namespace diffpair
