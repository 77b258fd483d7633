#include "diffpair/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "diffpair/analysis.hpp"

#include <json.hpp>

namespace diffpair {

using nlohmann::json;

MixtureWorld RunConfig::make_world() const {
    return world_file.empty() ? default_desk_world() : load_world(world_file);
}

NoiseSchedule RunConfig::make_schedule() const {
    return build_linear_schedule(schedule.T, schedule.beta_start, schedule.beta_end);
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    return f;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config: " + path);
    json j = json::parse(f);

    RunConfig cfg;
    read_if(j, "world_file", cfg.world_file);
    read_if(j, "out_dir", cfg.out_dir);
    read_if(j, "seed", cfg.seed);
    read_if(j, "workers", cfg.workers);
    if (j.contains("schedule")) {
        const json& s = j["schedule"];
        read_if(s, "T", cfg.schedule.T);
        read_if(s, "beta_start", cfg.schedule.beta_start);
        read_if(s, "beta_end", cfg.schedule.beta_end);
    }
    if (j.contains("dataset")) {
        const json& s = j["dataset"];
        read_if(s, "n_known_train", cfg.dataset.n_known_train);
        read_if(s, "mismatch_rho", cfg.dataset.mismatch_rho);
        read_if(s, "n_test_per_role", cfg.dataset.n_test_per_role);
        read_if(s, "rng_seed", cfg.dataset.rng_seed);
    }
    if (j.contains("generation")) {
        const json& s = j["generation"];
        read_if(s, "n_steps", cfg.generation.n_steps);
        read_if(s, "guidance_gamma", cfg.generation.guidance_gamma);
        read_if(s, "eta_positive", cfg.generation.eta_positive);
        read_if(s, "eta_negative", cfg.generation.eta_negative);
        read_if(s, "rng_seed", cfg.generation.rng_seed);
    }
    if (j.contains("train")) {
        const json& s = j["train"];
        read_if(s, "epochs", cfg.train.epochs);
        read_if(s, "batch_size", cfg.train.batch_size);
        read_if(s, "lr", cfg.train.lr);
        read_if(s, "lambda1", cfg.train.lambda1);
        read_if(s, "lambda2", cfg.train.lambda2);
        read_if(s, "hidden", cfg.train.hidden);
        if (s.contains("head_mode")) {
            std::string mode = s["head_mode"].get<std::string>();
            if (mode == "single_sigmoid")
                cfg.train.head_mode = BinaryHeadMode::single_sigmoid;
            else if (mode == "pair_softmax")
                cfg.train.head_mode = BinaryHeadMode::pair_softmax;
            else
                throw std::runtime_error("config: unknown head_mode '" + mode + "'");
        }
        if (s.contains("labeling")) {
            const json& l = s["labeling"];
            read_if(l, "threshold", cfg.train.labeling.threshold);
            read_if(l, "interval", cfg.train.labeling.interval);
            read_if(l, "rounds", cfg.train.labeling.rounds);
        }
        read_if(s, "rng_seed", cfg.train.rng_seed);
    }
    return cfg;
}

namespace {

// Seeds are tied to the run seed unless a sub-seed was set explicitly.
RunConfig resolve_seeds(RunConfig cfg) {
    if (cfg.dataset.rng_seed == DatasetSpec{}.rng_seed) cfg.dataset.rng_seed = cfg.seed;
    if (cfg.generation.rng_seed == GenerationConfig{}.rng_seed)
        cfg.generation.rng_seed = mix_seed(cfg.seed, 0x67656eULL);
    if (cfg.train.rng_seed == TrainConfig{}.rng_seed)
        cfg.train.rng_seed = mix_seed(cfg.seed, 0x747261696eULL);
    return cfg;
}

}  // namespace

int cmd_generate(const RunConfig& raw) {
    RunConfig cfg = resolve_seeds(raw);
    std::filesystem::create_directories(cfg.out_dir);
    MixtureWorld world = cfg.make_world();
    NoiseSchedule sched = cfg.make_schedule();
    NoisePredictorOracle oracle(world, sched);
    Dataset ds = sample_dataset(world, cfg.dataset);
    PairBank bank = generate_pair_bank(ds, world, cfg.generation, oracle, cfg.workers);

    save_dataset(ds, cfg.dataset_path());
    save_bank(bank, cfg.bank_path());

    json manifest = {
        {"seed", cfg.seed},
        {"train_samples", ds.train.size()},
        {"test_samples", ds.test.size()},
        {"known_classes", world.known_count},
        {"positives", bank.positives.size()},
        {"negatives", bank.negatives.size()},
        {"bank", cfg.bank_path()},
        {"dataset", cfg.dataset_path()},
    };
    open_out(cfg.manifest_path()) << manifest.dump(2) << "\n";
    std::cout << "generated " << bank.positives.size() << " positives and "
              << bank.negatives.size() << " negatives -> " << cfg.bank_path() << "\n";
    return 0;
}

int cmd_train(const RunConfig& raw) {
    RunConfig cfg = resolve_seeds(raw);
    if (!std::filesystem::exists(cfg.bank_path()))
        throw std::runtime_error("missing pair bank '" + cfg.bank_path() +
                                 "'; run the generate command first");
    std::filesystem::create_directories(cfg.out_dir);
    MixtureWorld world = cfg.make_world();
    Dataset ds = sample_dataset(world, cfg.dataset);
    PairBank bank = load_bank(cfg.bank_path(), world.dims);

    TrainResult result = train(world, ds, bank, cfg.train);
    save_checkpoint(result.model, cfg.checkpoint_path());

    // Ground truth joins the log here, outside the trainer.
    std::map<int, const LabeledSample*> by_id;
    for (const auto& s : ds.train) by_id[s.id] = &s;

    std::ofstream log = open_out(cfg.run_log_path());
    std::size_t next_round = 0;
    for (const auto& e : result.log.epochs) {
        json rec = {{"epoch", e.epoch},
                    {"loss_generated", e.generated},
                    {"loss_known", e.known},
                    {"loss_unknown", e.unknown}};
        log << rec.dump() << "\n";
        while (next_round < result.log.rounds.size() &&
               result.log.rounds[next_round].epoch == e.epoch) {
            const RoundLog& r = result.log.rounds[next_round++];
            int correct = 0;
            int to_known = 0, to_unknown = 0;
            for (const auto& sel : r.report.selected) {
                const LabeledSample* s = by_id.at(sel.id);
                if (sel.label <= result.model.known) {
                    ++to_known;
                    if (s->role == ClassRole::known && s->true_class == sel.label) ++correct;
                } else {
                    ++to_unknown;
                    if (s->role != ClassRole::known) ++correct;
                }
            }
            std::size_t n_sel = r.report.selected.size();
            json rj = {{"labeling_round", r.round},
                       {"epoch", r.epoch},
                       {"selected", n_sel},
                       {"to_known", to_known},
                       {"to_unknown", to_unknown},
                       {"precision", n_sel == 0 ? 1.0 : static_cast<double>(correct) / n_sel},
                       {"pool_after", r.report.pool_after}};
            log << rj.dump() << "\n";
        }
    }
    std::cout << "trained " << cfg.train.epochs << " epochs -> " << cfg.checkpoint_path() << "\n";
    return 0;
}

int cmd_eval(const RunConfig& raw, const std::string& checkpoint) {
    RunConfig cfg = resolve_seeds(raw);
    std::filesystem::create_directories(cfg.out_dir);
    MixtureWorld world = cfg.make_world();
    std::string ckpt = checkpoint.empty() ? cfg.checkpoint_path() : checkpoint;
    ClassifierModel model = load_checkpoint(ckpt);
    if (model.dims != world.dims || model.known != world.known_count)
        throw std::runtime_error("checkpoint shape (" + std::to_string(model.dims) + "d, K=" +
                                 std::to_string(model.known) + ") does not match the world");
    Dataset ds = sample_dataset(world, cfg.dataset);
    EvalReport rep = evaluate(model, ds.test);

    json j = {{"closed_known_acc", rep.closed_known_acc},
              {"open_known_acc", rep.open_known_acc},
              {"open_unknown_acc", rep.open_unknown_acc},
              {"open_new_acc", rep.open_new_acc},
              {"balance", rep.balance}};
    open_out(cfg.report_path()) << j.dump(2) << "\n";
    std::ofstream csv = open_out(cfg.metrics_csv_path());
    csv << "closed_known_acc,open_known_acc,open_unknown_acc,open_new_acc,balance\n";
    csv << rep.closed_known_acc << "," << rep.open_known_acc << "," << rep.open_unknown_acc << ","
        << rep.open_new_acc << "," << rep.balance << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const RunConfig& raw) {
    RunConfig cfg = resolve_seeds(raw);
    std::filesystem::create_directories(cfg.out_dir);
    MixtureWorld world = cfg.make_world();
    NoiseSchedule sched = cfg.make_schedule();
    NoisePredictorOracle oracle(world, sched);
    TimestepPath path = make_path(sched, cfg.generation.n_steps, PathDirection::forward);
    auto known = world.classes_with_role(ClassRole::known);

    Rng rng(mix_seed(cfg.seed, 0x766572696679ULL));
    json t1 = json::array(), t2 = json::array();
    for (int i = 0; i < 10; ++i) {
        auto ids = world.class_ids();
        int cls = ids[static_cast<std::size_t>(rng.below(ids.size()))];
        Vec x0 = world.components[0].mean;
        for (const auto& c : world.components)
            if (c.class_id == cls) {
                x0 = c.mean;
                double sd = std::sqrt(c.variance);
                for (auto& v : x0) v += sd * rng.gaussian();
                break;
            }
        int y = known[static_cast<std::size_t>(rng.below(known.size()))];
        t1.push_back(verify_theorem1(x0, y, path.n_segments(), path, oracle));
        t2.push_back(verify_theorem2(x0, y, path.n_segments(), path, oracle));
    }

    Vec profile = mean_delta_profile(oracle, path, 32, cfg.seed);
    json deltas = json::array();
    for (double v : profile) deltas.push_back(v);
    bool trend = profile.back() < profile.front();

    Vec x0 = world.components[0].mean;
    for (auto& v : x0) v += rng.gaussian();
    double depth0 = verify_theorem1(x0, known[0], 0, path, oracle);

    json report = {{"theorem1_residuals", t1},
                   {"theorem2_residuals", t2},
                   {"depth0_residual", depth0},
                   {"delta_one_minus_cos", deltas},
                   {"delta_decay_trend", trend}};
    open_out(cfg.verify_path()) << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace diffpair
