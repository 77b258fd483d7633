#pragma once

#include "diffpair/labeling.hpp"
#include "diffpair/metrics.hpp"

namespace diffpair {

struct TrainConfig {
    int epochs = 400;
    int batch_size = 32;
    double lr = 5e-3;
    double lambda1 = 1.0;
    double lambda2 = 2.0;
    int hidden = 64;
    BinaryHeadMode head_mode = BinaryHeadMode::pair_softmax;
    LabelingConfig labeling;
    std::uint64_t rng_seed = 1;

    void validate() const {
        require(epochs >= 0 && batch_size >= 1 && hidden >= 1, "train: bad counts");
        require(lr > 0.0 && lambda1 >= 0.0 && lambda2 >= 0.0, "train: bad rates");
        labeling.validate();
    }
};

struct EpochLosses {
    int epoch = 0;
    double generated = 0.0;  // mean batch loss over the pool stream
    double known = 0.0;      // mean over the d_known stream (0 when empty)
    double unknown = 0.0;    // mean over the d_unknown stream (0 when empty)
};

struct RoundLog {
    int round = 0;
    int epoch = 0;
    SelectionReport report;
};

struct RunLog {
    std::vector<EpochLosses> epochs;
    std::vector<RoundLog> rounds;
};

struct TrainResult {
    ClassifierModel model;
    PseudoLabelLedger ledger;
    RunLog log;
};

/// Full training loop: per epoch, one pass over each nonempty source stream
/// (pool pairs, pseudo-known with selected negatives, pseudo-unknown with
/// selected positives), Adam updates per batch, and a labeling round every
/// labeling.interval epochs up to labeling.rounds. Ground-truth labels are
/// never consulted; training sees TrainView features only.
TrainResult train(const MixtureWorld& world, const Dataset& dataset, const PairBank& bank,
                  const TrainConfig& cfg);

}  // namespace diffpair
