#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "diffpair/common.hpp"

namespace diffpair {

/// How the 2K open-head logits map to the K binary probabilities p(j|x):
/// per-pair softmax over (positive, negative) logits, or a sigmoid on the
/// positive logit alone.
enum class BinaryHeadMode { pair_softmax, single_sigmoid };

/// Shared tanh encoder, a 2K open-set head (K logit pairs, entry 0 of each
/// pair is the positive logit) and a K closed-set head. The input
/// standardizer is a fixed affine preprocessing recorded with the model.
struct ClassifierModel {
    int dims = 0;
    int hidden = 64;
    int known = 0;
    BinaryHeadMode head_mode = BinaryHeadMode::pair_softmax;

    Vec input_mean;   // size dims
    Vec input_scale;  // size dims, strictly positive

    Vec enc_w;     // hidden x dims, row-major
    Vec enc_b;     // hidden
    Vec open_w;    // 2K x hidden
    Vec open_b;    // 2K
    Vec closed_w;  // K x hidden
    Vec closed_b;  // K

    std::vector<Vec*> tensors();
    std::vector<const Vec*> tensors() const;
    static const char* tensor_name(std::size_t index);
};

struct ProbOutputs {
    Vec p_binary;  // K values in (0,1)
    Vec p_bar;     // K-way distribution over positive logits
    Vec p_closed;  // K-way distribution from the closed head
};

/// (features, class label in 1..K). Negatives carry the class they are a
/// negative FOR.
using ExampleRef = std::pair<const Vec*, int>;
using ExampleSet = std::vector<ExampleRef>;

ClassifierModel init_model(int dims, int hidden, int known, std::uint64_t seed,
                           BinaryHeadMode mode = BinaryHeadMode::pair_softmax);

ProbOutputs forward(const ClassifierModel& model, const Vec& x);

double loss_open_pairs(const ClassifierModel& model, const ExampleSet& positives,
                       const ExampleSet& negatives);
double loss_open_pos(const ClassifierModel& model, const ExampleSet& positives);
double loss_closed(const ClassifierModel& model, const ExampleSet& positives);

/// lambda1 * loss_open_pairs + lambda2 * (loss_open_pos + loss_closed).
double loss_generated(const ClassifierModel& model, const ExampleSet& positives,
                      const ExampleSet& negatives, double lambda1, double lambda2);

struct Gradients {
    Vec enc_w, enc_b, open_w, open_b, closed_w, closed_b;
    double loss = 0.0;

    std::vector<Vec*> tensors();
    std::vector<const Vec*> tensors() const;
};

Gradients loss_generated_gradients(const ClassifierModel& model, const ExampleSet& positives,
                                   const ExampleSet& negatives, double lambda1, double lambda2);

struct AdamState {
    std::vector<Vec> m, v;
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

AdamState make_adam_state(const ClassifierModel& model);
void adam_step(ClassifierModel& model, const Gradients& grads, double lr, AdamState& state);

}  // namespace diffpair
