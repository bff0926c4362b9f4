// Command-line front end: gen-envs, train, eval, sweep-learners, verify.
// Exit codes: 0 success, 1 usage or runtime error, 2 verification failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedgen/config.hpp"
#include "fedgen/envgen.hpp"
#include "fedgen/harness.hpp"
#include "fedgen/io.hpp"

namespace fs = std::filesystem;
using namespace fedgen;

namespace {

RunConfig load_with_overrides(const std::string& config_file,
                              const std::vector<std::string>& sets) {
    RunConfig cfg;
    if (!config_file.empty()) cfg = load_config(config_file);
    for (const auto& s : sets) apply_override(cfg, s);
    validate_run_config(cfg);
    return cfg;
}

int cmd_gen_envs(int count, std::uint64_t seed, const std::string& out,
                 const DisturbanceParams& dist) {
    write_corpus(out, count, seed, dist);
    std::printf("wrote %d environments to %s (seed %llu)\n", count, out.c_str(),
                static_cast<unsigned long long>(seed));
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    const auto art = harness::run_train(cfg);
    for (const auto& w : art.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (art.sigma_floor_hits > 0)
        std::fprintf(stderr, "note: sigma floor clamped %llu coordinates during the run\n",
                     static_cast<unsigned long long>(art.sigma_floor_hits));

    std::printf("run dir        %s\n", art.out_dir.string().c_str());
    if (art.result.convergence_round)
        std::printf("converged at   round %d\n", *art.result.convergence_round);
    else
        std::printf("converged at   (still active at round %d)\n", cfg.rounds);
    for (const auto& lr : art.result.learners) {
        const double y_final = lr.state.last ? lr.state.last->y : lr.y_init;
        std::printf("learner %d      y %s -> %s, adoptions %zu%s\n", lr.state.id,
                    format_double(lr.y_init).c_str(), format_double(y_final).c_str(),
                    lr.state.adoptions.size(), lr.state.stopped ? ", stopped" : "");
    }
    std::printf("rounds csv     %s\n", art.rounds_csv.string().c_str());
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::vector<std::string>& checkpoints,
             const std::string& out_csv, const std::string& episodes_csv, int dump_traj) {
    std::vector<fs::path> files(checkpoints.begin(), checkpoints.end());
    const auto rows = harness::run_eval(cfg, files, out_csv,
                                        episodes_csv.empty() ? fs::path{} : fs::path(episodes_csv),
                                        dump_traj);
    for (const auto& row : rows) {
        std::printf("%-36s arrival %s +- %s   mean J %s", row.policy.c_str(),
                    format_double(row.report.arrival_rate).c_str(),
                    format_double(row.report.rate_ci).c_str(),
                    format_double(row.report.mean_J).c_str());
        std::printf("   certified: cost <= %s%s, arrival >= %s%s (conf %s)\n",
                    format_double(row.cost_upper.value).c_str(),
                    row.cost_upper.vacuous ? " (vacuous)" : "",
                    format_double(row.arrival_lower.value).c_str(),
                    row.arrival_lower.vacuous ? " (vacuous)" : "",
                    format_double(1.0 - row.gamma).c_str());
    }
    std::printf("eval csv       %s\n", out_csv.c_str());
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<int>& counts, const std::string& out_dir) {
    const auto rows = harness::run_sweep(cfg, counts, out_dir);
    for (const auto& row : rows) {
        std::printf("V=%d  cost %s +- %s [%s, %s]", row.learners,
                    format_double(row.mean_cost).c_str(), format_double(row.std_cost).c_str(),
                    format_double(row.min_cost).c_str(), format_double(row.max_cost).c_str());
        if (row.mean_rate)
            std::printf("  arrival %s +- %s", format_double(*row.mean_rate).c_str(),
                        format_double(*row.std_rate).c_str());
        if (row.convergence_round)
            std::printf("  converged %d", *row.convergence_round);
        std::printf("  adoptions %d\n", row.adoptions);
    }
    std::printf("sweep csv      %s\n", (fs::path(out_dir) / "sweep.csv").string().c_str());
    return 0;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed) {
    const auto results = harness::run_verify(suites, seed);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%s  %-44s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated policy search with generalization certificates"};
    app.require_subcommand(1);

    // gen-envs
    auto* gen = app.add_subcommand("gen-envs", "generate an environment corpus directory");
    int gen_count = 100;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    DisturbanceParams gen_dist;
    gen->add_option("--count", gen_count, "number of environments")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "corpus seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--sigma-d", gen_dist.sigma_d, "disturbance std");
    gen->add_option("--corr-length", gen_dist.corr_length, "disturbance correlation length");
    gen->add_option("--grid-res", gen_dist.grid_res, "disturbance grid resolution");
    gen->add_option("--d-max", gen_dist.d_max, "disturbance cap");
    gen->add_option("--modes", gen_dist.modes, "spectral modes");

    const auto add_config_opts = [](CLI::App* sub, std::string& file,
                                    std::vector<std::string>& sets) {
        sub->add_option("--config", file, "config file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "override, e.g. --set learner.q=0.02");
    };

    // train
    auto* train = app.add_subcommand("train", "run the federated optimization");
    std::string train_config, train_out;
    std::vector<std::string> train_sets;
    add_config_opts(train, train_config, train_sets);
    train->add_option("--out", train_out, "output directory (overrides run.out)");

    // eval
    auto* ev = app.add_subcommand("eval", "roll policy checkpoints out on fresh environments");
    std::string eval_config, eval_out = "eval.csv", eval_episodes;
    std::vector<std::string> eval_sets, eval_ckpts;
    int eval_traj = 0;
    add_config_opts(ev, eval_config, eval_sets);
    ev->add_option("checkpoints", eval_ckpts, "policy checkpoint files")
        ->required()
        ->check(CLI::ExistingFile);
    ev->add_option("--out", eval_out, "output csv");
    ev->add_option("--episodes", eval_episodes, "also write per-episode csv");
    ev->add_option("--dump-traj", eval_traj, "dump pose traces for the first N cases");

    // sweep-learners
    auto* sw = app.add_subcommand("sweep-learners", "repeat the run at several federation sizes");
    std::string sweep_config, sweep_out;
    std::vector<std::string> sweep_sets;
    std::vector<int> sweep_counts{1, 2, 4, 8};
    add_config_opts(sw, sweep_config, sweep_sets);
    sw->add_option("--counts", sweep_counts, "federation sizes")->delimiter(',');
    sw->add_option("--out", sweep_out, "output directory (default <run.out>/sweep)");

    // verify
    auto* ver = app.add_subcommand("verify", "run self-check suites against independent oracles");
    std::vector<std::string> ver_suites;
    std::uint64_t ver_seed = 20260814;
    ver->add_option("--suite", ver_suites, "bounds | optimizer | nes | sensor | all");
    ver->add_option("--seed", ver_seed, "check seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_envs(gen_count, gen_seed, gen_out, gen_dist);
        if (train->parsed()) {
            RunConfig cfg = load_with_overrides(train_config, train_sets);
            if (!train_out.empty()) cfg.out_dir = train_out;
            return cmd_train(cfg);
        }
        if (ev->parsed()) {
            const RunConfig cfg = load_with_overrides(eval_config, eval_sets);
            return cmd_eval(cfg, eval_ckpts, eval_out, eval_episodes, eval_traj);
        }
        if (sw->parsed()) {
            const RunConfig cfg = load_with_overrides(sweep_config, sweep_sets);
            const std::string out =
                sweep_out.empty() ? (fs::path(cfg.out_dir) / "sweep").string() : sweep_out;
            return cmd_sweep(cfg, sweep_counts, out);
        }
        if (ver->parsed()) return cmd_verify(ver_suites, ver_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
