#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fedgen/envgen.hpp"

namespace fedgen {

// Everything a run needs, grouped the way the config file sections are.
// Defaults are the desk-scale settings; configs/ ships presets. Unknown keys
// are parse errors so typos cannot silently fall back to defaults.
struct RunConfig {
    // [run]
    std::string mode = "synthetic";  // "synthetic" or "motion"
    int learners = 4;
    int rounds = 300;
    std::uint64_t seed = 1;
    std::string out_dir = "runs/out";
    int threads = 1;
    int sigma_probe_repeats = 0;  // >=2 enables the pre-run gradient-noise probe

    // [learner]
    double r = 0.01;
    double rho = 0.8;
    double q = 0.04;
    double gamma = 0.01;
    int n_env = 10;
    int n_init = 1;

    // [synthetic]
    std::string synthetic_kind = "double_well";  // quadratic_well | double_well | multi_well
    int dim = 1;
    double well_center = 0.0;  // quadratic_well
    double well_gain = 1.0;
    // double_well: eta = clamp01(base + gain*min((x-m1)^2-d1, (x-m2)^2-d2))
    double well_m1 = -1.0, well_d1 = 0.3;
    double well_m2 = 1.0, well_d2 = 0.5;
    double well_base = 0.6;
    std::string wells;  // multi_well: "m,d;m,d;..." (1-D)
    double sigma_y = 0.1;
    double sigma_z = 0.01;
    double theta0_lo = -2.0, theta0_hi = 2.0;

    // [motion]
    std::vector<int> layers{24, 20, 20, 20, 1};
    double dt = 0.05;
    double t_max = 20.0;
    double alpha = 1.0;
    double footprint = 0.0;
    std::string sensor_fan = "asymmetric";  // asymmetric | symmetric
    int pairs = 15;
    double sigma_init = 0.05;
    double sigma_floor = 1e-3;
    bool resample_each_round = false;
    std::string env_corpus;            // directory of env_*.txt; empty generates from seed
    std::string stop_norm = "mu";      // mu | full
    DisturbanceParams disturbance;

    // [eval]
    int eval_samples = 500;
    std::uint64_t eval_seed = 0;  // 0 derives one from [run] seed
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& file);

// "section.key=value", the CLI --set form.
void apply_override(RunConfig& cfg, std::string_view assignment);

// Canonical echo of every key; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

void validate_run_config(const RunConfig& cfg);

}  // namespace fedgen
