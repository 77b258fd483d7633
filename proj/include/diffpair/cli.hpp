#pragma once

#include <string>

#include "diffpair/io.hpp"

namespace diffpair {

struct ScheduleConfig {
    int T = 100;
    double beta_start = 1e-4;
    double beta_end = 0.06;
};

/// One structured configuration per run; every field has a CLI flag of the
/// same name. Defaults reproduce the desk-scale experiment.
struct RunConfig {
    std::string world_file;  // empty = built-in desk world
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int workers = 1;
    ScheduleConfig schedule;
    DatasetSpec dataset;
    GenerationConfig generation;
    TrainConfig train;

    MixtureWorld make_world() const;
    NoiseSchedule make_schedule() const;

    std::string bank_path() const { return out_dir + "/bank.csv"; }
    std::string dataset_path() const { return out_dir + "/dataset.csv"; }
    std::string manifest_path() const { return out_dir + "/manifest.json"; }
    std::string checkpoint_path() const { return out_dir + "/checkpoint.txt"; }
    std::string run_log_path() const { return out_dir + "/run_log.jsonl"; }
    std::string report_path() const { return out_dir + "/report.json"; }
    std::string metrics_csv_path() const { return out_dir + "/metrics.csv"; }
    std::string verify_path() const { return out_dir + "/verify.json"; }
};

RunConfig load_run_config(const std::string& path);

int cmd_generate(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg, const std::string& checkpoint);
int cmd_verify(const RunConfig& cfg);

}  // namespace diffpair
