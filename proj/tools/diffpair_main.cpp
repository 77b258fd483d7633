#include <iostream>

#include <CLI11.hpp>

#include "diffpair/cli.hpp"

using diffpair::RunConfig;

namespace {

// Shared flags; every config key is overridable by a flag of the same name.
void add_common(CLI::App* cmd, std::string& config_path, RunConfig& cfg) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--seed", cfg.seed, "global run seed");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--workers", cfg.workers, "generation worker cap");
    cmd->add_option("--world-file", cfg.world_file, "world description file");
    cmd->add_option("--T", cfg.schedule.T, "schedule step count");
    cmd->add_option("--beta-start", cfg.schedule.beta_start, "first variance");
    cmd->add_option("--beta-end", cfg.schedule.beta_end, "last variance");
    cmd->add_option("--n-known-train", cfg.dataset.n_known_train, "known-role training samples");
    cmd->add_option("--mismatch-rho", cfg.dataset.mismatch_rho, "unknown-class mismatch proportion");
    cmd->add_option("--n-test-per-role", cfg.dataset.n_test_per_role, "test samples per role");
    cmd->add_option("--n-steps", cfg.generation.n_steps, "DDIM step count");
    cmd->add_option("--guidance-gamma", cfg.generation.guidance_gamma, "guidance scale");
    cmd->add_option("--eta-positive", cfg.generation.eta_positive, "positive-pipeline noise strength");
    cmd->add_option("--eta-negative", cfg.generation.eta_negative, "negative-pipeline noise strength");
    cmd->add_option("--epochs", cfg.train.epochs, "training epochs");
    cmd->add_option("--batch-size", cfg.train.batch_size, "batch size");
    cmd->add_option("--lr", cfg.train.lr, "learning rate");
    cmd->add_option("--lambda1", cfg.train.lambda1, "pair-loss weight");
    cmd->add_option("--lambda2", cfg.train.lambda2, "classification-loss weight");
    cmd->add_option("--hidden", cfg.train.hidden, "encoder width");
    cmd->add_option("--threshold", cfg.train.labeling.threshold, "pseudo-label confidence floor");
    cmd->add_option("--interval", cfg.train.labeling.interval, "epochs between labeling rounds");
    cmd->add_option("--rounds", cfg.train.labeling.rounds, "labeling round cap");
}

RunConfig merge(const std::string& config_path, const RunConfig& overrides, const CLI::App* cmd) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = diffpair::load_run_config(config_path);
    // Flags that were actually given win over the file.
    auto take = [&](const char* flag, auto member) {
        if (cmd->count(flag) > 0) cfg.*member = overrides.*member;
    };
    take("--seed", &RunConfig::seed);
    take("--out", &RunConfig::out_dir);
    take("--workers", &RunConfig::workers);
    take("--world-file", &RunConfig::world_file);
    if (cmd->count("--T")) cfg.schedule.T = overrides.schedule.T;
    if (cmd->count("--beta-start")) cfg.schedule.beta_start = overrides.schedule.beta_start;
    if (cmd->count("--beta-end")) cfg.schedule.beta_end = overrides.schedule.beta_end;
    if (cmd->count("--n-known-train")) cfg.dataset.n_known_train = overrides.dataset.n_known_train;
    if (cmd->count("--mismatch-rho")) cfg.dataset.mismatch_rho = overrides.dataset.mismatch_rho;
    if (cmd->count("--n-test-per-role"))
        cfg.dataset.n_test_per_role = overrides.dataset.n_test_per_role;
    if (cmd->count("--n-steps")) cfg.generation.n_steps = overrides.generation.n_steps;
    if (cmd->count("--guidance-gamma"))
        cfg.generation.guidance_gamma = overrides.generation.guidance_gamma;
    if (cmd->count("--eta-positive")) cfg.generation.eta_positive = overrides.generation.eta_positive;
    if (cmd->count("--eta-negative")) cfg.generation.eta_negative = overrides.generation.eta_negative;
    if (cmd->count("--epochs")) cfg.train.epochs = overrides.train.epochs;
    if (cmd->count("--batch-size")) cfg.train.batch_size = overrides.train.batch_size;
    if (cmd->count("--lr")) cfg.train.lr = overrides.train.lr;
    if (cmd->count("--lambda1")) cfg.train.lambda1 = overrides.train.lambda1;
    if (cmd->count("--lambda2")) cfg.train.lambda2 = overrides.train.lambda2;
    if (cmd->count("--hidden")) cfg.train.hidden = overrides.train.hidden;
    if (cmd->count("--threshold")) cfg.train.labeling.threshold = overrides.train.labeling.threshold;
    if (cmd->count("--interval")) cfg.train.labeling.interval = overrides.train.labeling.interval;
    if (cmd->count("--rounds")) cfg.train.labeling.rounds = overrides.train.labeling.rounds;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-driven pair synthesis and open-set classifier training"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint;
    RunConfig overrides;

    CLI::App* gen = app.add_subcommand("generate", "sample a dataset and build the pair bank");
    CLI::App* trainc = app.add_subcommand("train", "train the classifier on an existing bank");
    CLI::App* evalc = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    CLI::App* verify = app.add_subcommand("verify", "run the inversion identity checks");
    for (CLI::App* c : {gen, trainc, evalc, verify}) add_common(c, config_path, overrides);
    evalc->add_option("--checkpoint", checkpoint, "checkpoint path (defaults to <out>/checkpoint.txt)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return diffpair::cmd_generate(merge(config_path, overrides, gen));
        if (trainc->parsed()) return diffpair::cmd_train(merge(config_path, overrides, trainc));
        if (evalc->parsed())
            return diffpair::cmd_eval(merge(config_path, overrides, evalc), checkpoint);
        if (verify->parsed()) return diffpair::cmd_verify(merge(config_path, overrides, verify));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
