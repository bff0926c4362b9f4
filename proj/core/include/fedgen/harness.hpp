#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedgen/algorithm.hpp"
#include "fedgen/bounds.hpp"
#include "fedgen/config.hpp"
#include "fedgen/eval.hpp"
#include "fedgen/policy.hpp"
#include "fedgen/verify.hpp"

namespace fedgen::harness {

// One saved parameter snapshot. Policy snapshots carry the net shape plus the
// search distribution (mu, sigma); synthetic snapshots carry theta in `mu`
// and leave `sigma` empty. Written as "fedgen-policy v1" / "fedgen-theta v1"
// line records; save/load round-trips bit for bit.
struct Checkpoint {
    bool is_policy = false;
    MlpSpec mlp;  // meaningful only when is_policy
    int learner = 0;
    std::string role;  // init | first_stop | final
    int iteration = 0;
    double y = 0.0;
    double gamma = 0.0;
    double b_gamma = 0.0;
    double sigma_floor = 0.0;
    ParamVector mu;
    ParamVector sigma;
};

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

struct CheckpointRef {
    int learner = 0;
    std::string role;
    std::filesystem::path file;
};

struct TrainArtifacts {
    RunConfig cfg;
    RunResult result;
    std::vector<std::string> warnings;
    std::uint64_t sigma_floor_hits = 0;  // motion mode only
    std::filesystem::path out_dir;
    std::filesystem::path rounds_csv;
    std::vector<CheckpointRef> checkpoints;
};

// Runs the federation described by cfg and writes into cfg.out_dir:
//   config.cfg     canonical echo of the configuration
//   rounds.csv     one row per (round, learner)
//   checkpoints/   learner_XX_{init,first_stop,final}.txt
//   warnings.txt   advisory configuration warnings, when any
//   run_state.txt  run summary record
TrainArtifacts run_train(const RunConfig& cfg);

std::string rounds_csv_header();
std::string format_round_row(const RoundRecord& rec);

struct EvalRow {
    std::string policy;  // checkpoint file stem
    int learner = 0;
    std::string role;
    int iteration = 0;
    EvalReport report;
    double y_train = 0.0;
    double b_gamma = 0.0;
    double gamma = 0.0;
    bounds::Certificate cost_upper;
    bounds::Certificate arrival_lower;
};

// Rolls each policy checkpoint out over one shared batch of fresh
// environments and writes out_csv. episodes_csv, when nonempty, records every
// episode; dump_trajectories > 0 writes pose traces for the first cases of
// each policy under <out_csv dir>/traj/.
std::vector<EvalRow> run_eval(const RunConfig& cfg,
                              const std::vector<std::filesystem::path>& checkpoints,
                              const std::filesystem::path& out_csv,
                              const std::filesystem::path& episodes_csv = {},
                              int dump_trajectories = 0);

struct SweepRow {
    int learners = 0;
    std::uint64_t seed = 0;
    std::optional<int> convergence_round;
    int adoptions = 0;
    // Final-parameter cost per learner: evaluation mean arrival cost in
    // motion mode, true landscape cost in synthetic mode.
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double min_cost = 0.0;
    double max_cost = 0.0;
    std::optional<double> mean_rate;  // motion only
    std::optional<double> std_rate;
};

// Repeats the configured run at each federation size with a disjoint seed
// block per size, writes sweep_vNN/ run directories plus sweep.csv.
std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<int>& counts,
                                const std::filesystem::path& out_dir);

// Dispatch for the verify command. Known suites: bounds, optimizer, nes,
// sensor; empty or "all" runs everything.
std::vector<verify::CheckResult> run_verify(const std::vector<std::string>& suites,
                                            std::uint64_t seed);

}  // namespace fedgen::harness
