#include "diffpair/trainer.hpp"

#include <cmath>

namespace diffpair {

namespace {

void standardize_from_pool(ClassifierModel& model, const std::vector<TrainView>& views) {
    // Fixed per-run affine preprocessing; keeps the tanh encoder in range for
    // worlds living far from the origin.
    std::size_t d = static_cast<std::size_t>(model.dims);
    Vec mean(d, 0.0), var(d, 0.0);
    for (const auto& v : views)
        for (std::size_t i = 0; i < d; ++i) mean[i] += (*v.features)[i];
    for (auto& m : mean) m /= static_cast<double>(views.size());
    for (const auto& v : views)
        for (std::size_t i = 0; i < d; ++i) {
            double diff = (*v.features)[i] - mean[i];
            var[i] += diff * diff;
        }
    for (std::size_t i = 0; i < d; ++i) {
        model.input_mean[i] = mean[i];
        model.input_scale[i] = std::max(std::sqrt(var[i] / static_cast<double>(views.size())), 1e-12);
    }
}

double run_batches(ClassifierModel& model, AdamState& adam, const TrainConfig& cfg,
                   const std::vector<ExampleSet>& pos_batches,
                   const std::vector<ExampleSet>& neg_batches, int epoch, const char* stream) {
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < pos_batches.size(); ++b) {
        Gradients g = loss_generated_gradients(model, pos_batches[b], neg_batches[b], cfg.lambda1,
                                               cfg.lambda2);
        if (!std::isfinite(g.loss))
            throw std::runtime_error("train: non-finite loss in epoch " + std::to_string(epoch) +
                                     ", stream " + stream + ", batch " + std::to_string(b));
        adam_step(model, g, cfg.lr, adam);
        loss_sum += g.loss;
    }
    return pos_batches.empty() ? 0.0 : loss_sum / static_cast<double>(pos_batches.size());
}

}  // namespace

TrainResult train(const MixtureWorld& world, const Dataset& dataset, const PairBank& bank,
                  const TrainConfig& cfg) {
    cfg.validate();
    int K = world.known_count;
    require(K >= 1, "train: world has no known classes");
    require(!dataset.train.empty(), "train: empty dataset");

    auto views = dataset.train_views();
    std::map<int, const Vec*> features;
    for (const auto& v : views) features[v.id] = v.features;

    TrainResult out;
    out.model = init_model(world.dims, cfg.hidden, K, cfg.rng_seed, cfg.head_mode);
    standardize_from_pool(out.model, views);
    out.ledger = init_ledger(views, bank, cfg.rng_seed);

    AdamState adam = make_adam_state(out.model);
    int rounds_done = 0;

    int pool_batch = std::max(1, (cfg.batch_size + K - 1) / K);
    int real_batch = std::max(1, (cfg.batch_size + 1) / 2);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(mix_seed(cfg.rng_seed, 0x65706f6368ULL + static_cast<std::uint64_t>(epoch)));
        EpochLosses losses;
        losses.epoch = epoch;

        // Pool stream: each seed contributes its remaining generated pairs.
        {
            std::vector<int> order = out.ledger.pool;
            shuffle_rng.shuffle(order);
            std::vector<ExampleSet> pb, nb;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(pool_batch)) {
                ExampleSet P, N;
                std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(pool_batch));
                for (std::size_t i = start; i < stop; ++i) {
                    int id = order[i];
                    for (std::size_t idx : out.ledger.seed_pos.at(id))
                        P.push_back({&bank.positives[idx].features, bank.positives[idx].prompt_class});
                    for (std::size_t idx : out.ledger.seed_neg.at(id))
                        N.push_back({&bank.negatives[idx].features, bank.negatives[idx].prompt_class});
                }
                pb.push_back(std::move(P));
                nb.push_back(std::move(N));
            }
            losses.generated = run_batches(out.model, adam, cfg, pb, nb, epoch, "pool");
        }

        // Pseudo-known stream: real samples as positives, their selected
        // generated negatives as counterparts.
        if (!out.ledger.d_known.empty()) {
            std::vector<KnownEntry> order = out.ledger.d_known;
            shuffle_rng.shuffle(order);
            std::vector<ExampleSet> pb, nb;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(real_batch)) {
                ExampleSet P, N;
                std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(real_batch));
                for (std::size_t i = start; i < stop; ++i) {
                    const auto& e = order[i];
                    P.push_back({features.at(e.id), e.label});
                    N.push_back({&bank.negatives[e.neg_index].features,
                                 bank.negatives[e.neg_index].prompt_class});
                }
                pb.push_back(std::move(P));
                nb.push_back(std::move(N));
            }
            losses.known = run_batches(out.model, adam, cfg, pb, nb, epoch, "known");
        }

        // Pseudo-unknown stream: selected generated positives against the
        // real samples as negatives for the same prompt.
        if (!out.ledger.d_unknown.empty()) {
            std::vector<UnknownEntry> order = out.ledger.d_unknown;
            shuffle_rng.shuffle(order);
            std::vector<ExampleSet> pb, nb;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(real_batch)) {
                ExampleSet P, N;
                std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(real_batch));
                for (std::size_t i = start; i < stop; ++i) {
                    const auto& e = order[i];
                    int prompt = bank.positives[e.pos_index].prompt_class;
                    P.push_back({&bank.positives[e.pos_index].features, prompt});
                    N.push_back({features.at(e.id), prompt});
                }
                pb.push_back(std::move(P));
                nb.push_back(std::move(N));
            }
            losses.unknown = run_batches(out.model, adam, cfg, pb, nb, epoch, "unknown");
        }

        out.log.epochs.push_back(losses);

        if (cfg.labeling.interval > 0 && epoch % cfg.labeling.interval == 0 &&
            rounds_done < cfg.labeling.rounds) {
            ++rounds_done;
            SelectionReport rep =
                assign_pseudo_labels(out.model, out.ledger, bank, views, cfg.labeling);
            out.log.rounds.push_back({rounds_done, epoch, std::move(rep)});
        }
    }
    return out;
}

}  // namespace diffpair
