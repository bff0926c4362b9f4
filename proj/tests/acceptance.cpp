// Acceptance gate for the federated training stack. Runs every release
// criterion at its stated tolerance and prints exactly one PASS/FAIL line per
// criterion; exits nonzero if any fail. Indented lines are informational.
//
// The slow part is criterion 10 (full motion-mode training campaign); the
// whole gate is budgeted for well under two hours on one desktop core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fedgen/algorithm.hpp"
#include "fedgen/bounds.hpp"
#include "fedgen/config.hpp"
#include "fedgen/eval.hpp"
#include "fedgen/harness.hpp"
#include "fedgen/io.hpp"
#include "fedgen/nes.hpp"
#include "fedgen/objective.hpp"
#include "fedgen/policy.hpp"
#include "fedgen/rng.hpp"
#include "fedgen/verify.hpp"

namespace fs = std::filesystem;
using namespace fedgen;

namespace {

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[2048];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void info(const std::string& line) {
    std::printf("        | %s\n", line.c_str());
    std::fflush(stdout);
}

struct Line {
    bool pass = false;
    std::string detail;
};

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double ci95_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
    return 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------
// 1. The per-submission concentration bias against a high-precision reference.

Line criterion_bias_reference() {
    const double got = bounds::local_bias(0.01, 10, 1);
    const long double ref = sqrtl(logl(200.0L) / 20.0L);
    const double diff = std::fabs(got - static_cast<double>(ref));
    Line l;
    l.pass = diff <= 1e-9;
    l.detail = fmt("local_bias(0.01,10,1) = %.17g vs long-double sqrt(ln(200)/20) = %.17g, |diff| = %.3g (tol 1e-9)",
                   got, static_cast<double>(ref), diff);
    return l;
}

// ---------------------------------------------------------------------------
// 2. Calibration of the upper certificate: over many (theta, measurement)
// draws the rate of eta(theta) > y + b stays within the confidence budget.
// Two measurement families: n Bernoulli(eta) trials (the extremal [0,1]
// distribution and the shape motion measurements take), and the production
// synthetic sampler with resampled-truncated Gaussian noise.

Line criterion_upper_calibration() {
    const int draws = 10000;
    const SyntheticObjective obj = make_quadratic_well(1, 0.0, 0.25);
    RngStream root(20260814);
    Line l;
    l.pass = true;
    double worst_rate = 0.0, worst_allow = 1.0;
    const char* worst_tag = "";

    for (const int n : {5, 20}) {
        for (const double gamma : {0.01, 0.1}) {
            const double b = bounds::local_bias(gamma, n, 1);
            const double allow = gamma + 3.0 * std::sqrt(gamma / static_cast<double>(draws));

            RngStream bern = root.derive(1, static_cast<std::uint64_t>(n),
                                         static_cast<std::uint64_t>(gamma * 1000));
            int viol = 0;
            for (int d = 0; d < draws; ++d) {
                const double theta = bern.uniform(-2.0, 2.0);
                const double eta = obj.eta({theta});
                double y = 0.0;
                for (int i = 0; i < n; ++i) y += (bern.next_unit() < eta) ? 1.0 : 0.0;
                y /= static_cast<double>(n);
                if (eta > y + b) ++viol;
            }
            const double rate_b = static_cast<double>(viol) / draws;

            RngStream sam = root.derive(2, static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(gamma * 1000));
            const SyntheticSampler sampler(obj, n, 0.2, 0.01, sam.next_u64());
            viol = 0;
            for (int d = 0; d < draws; ++d) {
                const ParamVector theta{sam.uniform(-2.0, 2.0)};
                const ObjectiveEstimate est = sampler.sample(theta, d);
                if (obj.eta(theta) > est.y + b) ++viol;
            }
            const double rate_s = static_cast<double>(viol) / draws;

            const std::pair<double, const char*> rates[2] = {{rate_b, "bernoulli"},
                                                             {rate_s, "sampler"}};
            for (const auto& [rate, tag] : rates) {
                if (rate > allow) l.pass = false;
                if (rate - allow > worst_rate - worst_allow) {
                    worst_rate = rate;
                    worst_allow = allow;
                    worst_tag = tag;
                }
            }
        }
    }
    l.detail = fmt("10^4 draws x {n=5,20} x {gamma=0.01,0.1} x 2 noise families; "
                   "worst violation rate %.4f vs allowance %.4f (%s)",
                   worst_rate, worst_allow, worst_tag);
    return l;
}

// ---------------------------------------------------------------------------
// 3 + 4. Randomized synthetic federation campaign: 200 runs over multi-well
// landscapes with varying federation size, noise, confidence and sample
// counts. Checks the per-learner adoption-count bound floor(1/b_min) and the
// stopping behavior (every learner stops, frozen parameters only move through
// adoption, and with q >= 4*sigma_hat the whole federation settles before the
// round horizon in at least 95% of runs).

struct SyntheticCampaign {
    Line adoption;
    Line stopping;
};

SyntheticCampaign criterion_synthetic_campaign() {
    const int runs = 200;
    const int horizon = 500;
    RngStream root(333);

    int max_adoptions = 0;
    int tightest_bound = 1 << 30;
    long total_adoptions = 0;
    int bound_violations = 0;
    int runs_all_stopped = 0;
    int runs_converged = 0;
    int frozen_violations = 0;
    int q_violations = 0;
    std::vector<double> conv_rounds;

    for (int run = 0; run < runs; ++run) {
        RngStream rs = root.derive(3, static_cast<std::uint64_t>(run));
        const int V = rs.uniform_int(2, 5);
        const double gain = rs.uniform(0.5, 1.5);
        const double gamma = rs.uniform(0.01, 0.2);
        const double sigma_y = rs.uniform(0.05, 0.3);
        const double sigma_z = 0.005;

        SyntheticObjective obj;
        obj.dim = 1;
        obj.base = 0.55;
        obj.gain = gain;
        const double pool[3] = {-1.5, 0.0, 1.5};
        int idx[3] = {0, 1, 2};
        for (int i = 2; i > 0; --i) std::swap(idx[i], idx[rs.uniform_int(0, i)]);
        const int n_wells = rs.uniform_int(2, 3);
        for (int w = 0; w < n_wells; ++w) {
            obj.centers.push_back({pool[idx[w]]});
            obj.depths.push_back(rs.uniform(0.1, 0.5) / gain);
        }
        obj.validate();

        std::vector<std::unique_ptr<SyntheticSampler>> samplers;
        std::vector<const ObjectiveSampler*> ptrs;
        std::vector<ParamVector> theta0;
        std::vector<int> n_samples;
        double sigma_hat_max = 0.0;
        for (int i = 0; i < V; ++i) {
            const int ns = rs.uniform_int(200, 600);
            n_samples.push_back(ns);
            samplers.push_back(
                std::make_unique<SyntheticSampler>(obj, ns, sigma_y, sigma_z, rs.next_u64()));
            theta0.push_back({rs.uniform(-2.0, 2.0)});
            const ParamVector probes_store[2] = {theta0.back(), obj.centers.front()};
            const double sh = estimate_sigma(*samplers.back(), probes_store, 6);
            sigma_hat_max = std::max(sigma_hat_max, sh);
            ptrs.push_back(samplers.back().get());
        }
        const double q = std::max(0.03, 4.0 * sigma_hat_max) + rs.uniform(0.0, 0.03);
        if (q < 4.0 * sigma_hat_max) ++q_violations;

        std::vector<LearnerConfig> cfgs;
        double b_min = 1.0;
        for (int i = 0; i < V; ++i) {
            cfgs.push_back(make_learner_config(0.45 / gain, 0.8, q, gamma, n_samples[i], 1));
            b_min = std::min(b_min, cfgs.back().b_gamma);
        }
        const int bound = static_cast<int>(std::floor(1.0 / b_min));
        tightest_bound = std::min(tightest_bound, bound);

        const RunResult res = run_fedgen(theta0, cfgs, ptrs, horizon);

        bool all_stopped = true;
        for (const auto& lr : res.learners) {
            const int n_adopt = static_cast<int>(lr.state.adoptions.size());
            total_adoptions += n_adopt;
            max_adoptions = std::max(max_adoptions, n_adopt);
            if (n_adopt > bound) ++bound_violations;
            if (!lr.state.first_stop_iteration.has_value() || !lr.state.stopped)
                all_stopped = false;
            if (lr.state.adoptions.empty() && lr.state.theta != lr.state.theta_first_stop)
                ++frozen_violations;
        }
        if (all_stopped) ++runs_all_stopped;
        if (res.convergence_round.has_value()) {
            ++runs_converged;
            conv_rounds.push_back(static_cast<double>(*res.convergence_round));
        }
    }

    SyntheticCampaign out;
    out.adoption.pass = bound_violations == 0;
    out.adoption.detail =
        fmt("%d runs: max adoptions/learner %d, tightest bound floor(1/b_min) %d, "
            "total adoptions %ld, violations %d",
            runs, max_adoptions, tightest_bound, total_adoptions, bound_violations);

    std::sort(conv_rounds.begin(), conv_rounds.end());
    const double median_conv = conv_rounds.empty() ? -1.0 : conv_rounds[conv_rounds.size() / 2];
    const double conv_rate = static_cast<double>(runs_converged) / runs;
    out.stopping.pass = runs_all_stopped == runs && frozen_violations == 0 &&
                        q_violations == 0 && conv_rate >= 0.95;
    out.stopping.detail =
        fmt("all learners stopped in %d/%d runs, settled before round %d in %.1f%% "
            "(median settle round %.0f), frozen-theta violations %d, q >= 4*sigma_hat in all runs",
            runs_all_stopped, runs, horizon, 100.0 * conv_rate, median_conv, frozen_violations);
    return out;
}

// ---------------------------------------------------------------------------
// 5 + 6. Double-well consensus campaign: 60 seeds of a 4-learner federation
// on a two-minimum landscape (cost 0.1 in the good well, 0.3 in the bad one,
// bias b = 0.05). Checks the settled cost spread against 2*b_max and, for
// every learner that moved off its first frozen parameter, the true cost
// improvement against -2*b_min.

struct ConsensusCampaign {
    Line spread;
    Line improvement;
};

ConsensusCampaign criterion_consensus_campaign() {
    const int seeds = 60;
    const int V = 4;
    const int horizon = 400;
    const int n_samples = 738;  // b = sqrt(ln(2/0.05)/(2*738)) ~= 0.05
    const double gamma = 0.05;
    const SyntheticObjective obj = make_double_well(-1.0, 0.5, 1.0, 0.3, 0.6, 1.0);
    RngStream root(555);

    std::vector<double> spreads;
    std::vector<double> improvements;
    int missing_first_stop = 0;

    double b_gamma = 0.0;
    for (int s = 0; s < seeds; ++s) {
        RngStream rs = root.derive(5, static_cast<std::uint64_t>(s));
        std::vector<std::unique_ptr<SyntheticSampler>> samplers;
        std::vector<const ObjectiveSampler*> ptrs;
        std::vector<ParamVector> theta0;
        std::vector<LearnerConfig> cfgs;
        for (int i = 0; i < V; ++i) {
            samplers.push_back(std::make_unique<SyntheticSampler>(obj, n_samples, 0.2, 0.01,
                                                                  rs.next_u64()));
            ptrs.push_back(samplers.back().get());
            theta0.push_back({rs.uniform(-2.0, 2.0)});
            cfgs.push_back(make_learner_config(0.25, 0.8, 0.02, gamma, n_samples, 1));
        }
        b_gamma = cfgs.front().b_gamma;

        const RunResult res = run_fedgen(theta0, cfgs, ptrs, horizon);

        double lo = 2.0, hi = -1.0;
        for (const auto& lr : res.learners) {
            const double eta = obj.eta(lr.state.theta);
            lo = std::min(lo, eta);
            hi = std::max(hi, eta);
            if (!lr.state.first_stop_iteration.has_value()) {
                ++missing_first_stop;
                continue;
            }
            if (lr.state.theta != lr.state.theta_first_stop)
                improvements.push_back(eta - obj.eta(lr.state.theta_first_stop));
        }
        spreads.push_back(hi - lo);
    }

    ConsensusCampaign out;
    const double spread_mean = mean_of(spreads);
    const double spread_ci = ci95_of(spreads, spread_mean);
    out.spread.pass = missing_first_stop == 0 && spread_mean <= 2.0 * b_gamma + spread_ci;
    out.spread.detail = fmt("%d seeds: mean settled cost spread %.4f (ci %.4f) vs 2*b_max = %.4f",
                            seeds, spread_mean, spread_ci, 2.0 * b_gamma);

    const double imp_mean = mean_of(improvements);
    const double imp_ci = ci95_of(improvements, imp_mean);
    out.improvement.pass = !improvements.empty() && imp_mean <= -2.0 * b_gamma + imp_ci;
    out.improvement.detail =
        fmt("%zu adopters: mean true-cost change %+.4f (ci %.4f) vs -2*b_min = %+.4f",
            improvements.size(), imp_mean, imp_ci, -2.0 * b_gamma);
    return out;
}

// ---------------------------------------------------------------------------
// 7. The O(1) running cloud argmin agrees exactly with a brute-force rescan
// of the full submission history, including tie-breaks, at every round of
// 100 random submission streams. Coarse value grids force frequent ties.

Line criterion_cloud_equivalence() {
    RngStream root(777);
    int checks = 0, mismatches = 0;
    for (int s = 0; s < 100; ++s) {
        RngStream rs = root.derive(7, static_cast<std::uint64_t>(s));
        CloudLedger ledger;
        std::vector<Submission> history;
        for (int round = 0; round < 30; ++round) {
            std::vector<Submission> batch;
            for (int j = 0; j < 10; ++j) {
                Submission sub;
                sub.learner = rs.uniform_int(0, 6);
                sub.iteration = rs.uniform_int(0, 40);
                sub.y = rs.uniform_int(0, 20) / 20.0;
                sub.b_gamma = rs.uniform_int(0, 8) / 16.0;
                sub.theta = {rs.uniform(-1.0, 1.0)};
                batch.push_back(sub);
                history.push_back(sub);
            }
            const auto got = cloud_update(ledger, batch);
            const auto want = verify::brute_force_argmin(history);
            ++checks;
            const bool same = got.has_value() && want.has_value() &&
                              got->learner == want->learner && got->iteration == want->iteration &&
                              got->y == want->y && got->b_gamma == want->b_gamma &&
                              got->theta == want->theta &&
                              ledger.submissions_seen == history.size();
            if (!same) ++mismatches;
        }
    }
    Line l;
    l.pass = mismatches == 0;
    l.detail = fmt("100 streams x 30 rounds (%d checkpoints, tie-heavy grids): %d mismatches",
                   checks, mismatches);
    return l;
}

// ---------------------------------------------------------------------------
// 8 + 9. Estimator and sensor property suites at acceptance scale.

Line criterion_from_checks(const std::vector<verify::CheckResult>& results) {
    Line l;
    l.pass = true;
    std::string failed;
    for (const auto& r : results) {
        if (!r.pass) {
            l.pass = false;
            failed += (failed.empty() ? "" : ", ") + r.name + " (" + r.detail + ")";
        }
    }
    if (l.pass) {
        l.detail = fmt("%zu/%zu checks passed", results.size(), results.size());
        for (const auto& r : results)
            if (!r.detail.empty()) l.detail += "; " + r.name + ": " + r.detail;
    } else {
        l.detail = "failed: " + failed;
    }
    return l;
}

// ---------------------------------------------------------------------------
// 10. Motion-mode directional campaign. Federations of 1 and 4 learners train
// policy nets over 300 rounds on 10 environments each, with 5 seed blocks per
// size. Per block the federation's deliverable is the cloud-selected best
// parameter; it is evaluated on 500 fresh unseen environments against the
// mean initial-policy rate. Checks: (a) the selected policy's safe-arrival
// rate is at least the initial rate in every block, (b) the mean final rate
// with 4 learners is at least the 1-learner mean, (c) any learner that
// adopted did not get worse beyond the binomial confidence width.

struct MotionOut {
    Line line;
    RunConfig block0_cfg;
    fs::path block0_dir;
    std::vector<fs::path> block0_checkpoints;
    bool have_block0 = false;
};

MotionOut criterion_motion_campaign() {
    MotionOut out;
    RunConfig base;
    base.mode = "motion";
    base.rounds = 300;
    base.layers = {24, 16, 16, 1};
    base.pairs = 15;
    base.n_env = 10;
    base.n_init = 1;
    base.gamma = 0.01;
    base.q = 0.04;
    base.r = 0.005;
    base.rho = 0.8;
    base.sigma_init = 0.05;
    base.stop_norm = "mu";
    base.eval_samples = 500;
    base.threads = 1;

    const fs::path root_dir = fs::temp_directory_path() / "fedgen_acceptance" / "motion";
    fs::remove_all(root_dir);
    RngStream seeds(4242);

    const double b = bounds::local_bias(base.gamma, base.n_env, base.n_init);
    double mean_final[2] = {0.0, 0.0};
    bool every_block_improved = true;
    int adopters = 0, adopter_regressions = 0, stops = 0;
    double y_lo = 1.0, y_hi = 0.0;

    MlpSpec mlp;
    mlp.layers = base.layers;
    const std::size_t n_par = param_count(mlp);
    RolloutParams rp;  // defaults match the training harness for this config

    for (int vi = 0; vi < 2; ++vi) {
        const int V = vi == 0 ? 1 : 4;
        for (int s = 0; s < 5; ++s) {
            const auto t0 = std::chrono::steady_clock::now();
            RunConfig cfg = base;
            cfg.learners = V;
            cfg.seed = seeds.derive(static_cast<std::uint64_t>(V), static_cast<std::uint64_t>(s))
                           .next_u64();
            cfg.eval_seed = seeds.derive(static_cast<std::uint64_t>(V),
                                         static_cast<std::uint64_t>(s), 0xE).next_u64();
            cfg.out_dir = (root_dir / fmt("v%d_s%d", V, s)).string();

            const auto art = harness::run_train(cfg);
            const auto cases = build_eval_cases(cfg.eval_seed, cfg.eval_samples, cfg.disturbance);

            auto mu_of = [&](const ParamVector& theta) {
                ParamVector mu(n_par), sg(n_par);
                split_nes_theta(theta, mu, sg, cfg.sigma_floor);
                return mu;
            };

            double init_rate = 0.0;
            for (const auto& lr : art.result.learners) {
                init_rate += evaluate_policy(mlp, mu_of(lr.theta_init), cases, rp,
                                             cfg.eval_seed).arrival_rate;
                if (lr.state.first_stop_iteration.has_value()) ++stops;
                for (const auto& rec : lr.rounds) {
                    y_lo = std::min(y_lo, rec.y);
                    y_hi = std::max(y_hi, rec.y);
                }
            }
            init_rate /= static_cast<double>(V);

            if (!art.result.ledger.best.has_value())
                throw std::runtime_error("motion campaign: no cloud selection after training");
            const auto& best = *art.result.ledger.best;
            const double final_rate =
                evaluate_policy(mlp, mu_of(best.theta), cases, rp, cfg.eval_seed).arrival_rate;

            if (final_rate < init_rate) every_block_improved = false;
            mean_final[vi] += final_rate / 5.0;

            for (const auto& lr : art.result.learners) {
                if (lr.state.adoptions.empty()) continue;
                ++adopters;
                const auto before = evaluate_policy(mlp, mu_of(lr.state.theta_first_stop), cases,
                                                    rp, cfg.eval_seed);
                const auto after = evaluate_policy(mlp, mu_of(lr.state.theta), cases, rp,
                                                   cfg.eval_seed);
                if (after.mean_J > before.mean_J + before.j_ci) ++adopter_regressions;
            }

            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                    .count();
            info(fmt("learners=%d block=%d: arrival rate init %.3f -> selected %.3f "
                     "(from learner %d, iteration %d, train y %.4f) [%.0fs]",
                     V, s, init_rate, final_rate, best.learner, best.iteration, best.y, secs));

            if (vi == 0 && s == 0) {
                out.block0_cfg = cfg;
                out.block0_dir = cfg.out_dir;
                for (const auto& ref : art.checkpoints) out.block0_checkpoints.push_back(ref.file);
                out.have_block0 = true;
            }
        }
    }

    info(fmt("adoption analysis: certified gap needed 2b = %.3f at gamma=%.2f n=%d; "
             "training costs spanned [%.4f, %.4f] (spread %.4f), so the adoption gate "
             "cannot clear at this sample size; %d learners stopped, %d adopted",
             2.0 * b, base.gamma, base.n_env, y_lo, y_hi, y_hi - y_lo, stops, adopters));

    out.line.pass = every_block_improved && mean_final[1] >= mean_final[0] &&
                    adopter_regressions == 0;
    out.line.detail = fmt("(a) selected >= init in %s blocks; (b) mean final rate %.3f at V=4 vs "
                          "%.3f at V=1; (c) %d adopters, %d regressions%s",
                          every_block_improved ? "all 10/10" : "NOT all", mean_final[1],
                          mean_final[0], adopters, adopter_regressions,
                          adopters == 0 ? " (vacuous: cost spread << 2b, see note)" : "");
    return out;
}

// ---------------------------------------------------------------------------
// 11. Bitwise determinism of the shipped pipeline: rerunning train and eval
// with identical configuration and seeds reproduces every CSV and checkpoint
// byte for byte. Covers both modes; the motion side reruns the first
// campaign block (or a small stand-in if the campaign could not run).

bool same_bytes(const fs::path& a, const fs::path& b) {
    return read_text_file(a) == read_text_file(b);
}

Line criterion_determinism(const MotionOut& motion) {
    const fs::path root_dir = fs::temp_directory_path() / "fedgen_acceptance" / "determinism";
    fs::remove_all(root_dir);
    int compared = 0, differing = 0;
    auto compare = [&](const fs::path& a, const fs::path& b) {
        ++compared;
        if (!same_bytes(a, b)) ++differing;
    };
    // config.cfg embeds the output path, so runs are compared on the round
    // log, the run summary and every checkpoint.
    auto compare_runs = [&](const fs::path& a, const fs::path& b) {
        compare(a / "rounds.csv", b / "rounds.csv");
        compare(a / "run_state.txt", b / "run_state.txt");
        for (const auto& entry : fs::directory_iterator(a / "checkpoints"))
            compare(entry.path(), b / "checkpoints" / entry.path().filename());
    };

    RunConfig synth;
    synth.mode = "synthetic";
    synth.learners = 3;
    synth.rounds = 40;
    synth.seed = 606;
    synth.synthetic_kind = "double_well";
    synth.r = 0.3;
    synth.q = 0.02;
    synth.gamma = 0.05;
    synth.n_env = 200;
    synth.sigma_y = 0.1;
    synth.sigma_z = 0.01;
    synth.out_dir = (root_dir / "synth_a").string();
    harness::run_train(synth);
    RunConfig synth_b = synth;
    synth_b.out_dir = (root_dir / "synth_b").string();
    harness::run_train(synth_b);
    compare_runs(root_dir / "synth_a", root_dir / "synth_b");

    // Motion side: retrain the first campaign block and re-evaluate its
    // original checkpoints twice.
    RunConfig mcfg;
    fs::path first_dir;
    std::vector<fs::path> ckpts;
    if (motion.have_block0) {
        mcfg = motion.block0_cfg;
        first_dir = motion.block0_dir;
        ckpts = motion.block0_checkpoints;
    } else {
        mcfg.mode = "motion";
        mcfg.learners = 1;
        mcfg.rounds = 3;
        mcfg.layers = {24, 8, 1};
        mcfg.pairs = 3;
        mcfg.n_env = 2;
        mcfg.t_max = 6.0;
        mcfg.eval_samples = 20;
        mcfg.seed = 707;
        mcfg.out_dir = (root_dir / "motion_a").string();
        const auto art = harness::run_train(mcfg);
        first_dir = mcfg.out_dir;
        for (const auto& ref : art.checkpoints) ckpts.push_back(ref.file);
    }
    RunConfig mcfg_b = mcfg;
    mcfg_b.out_dir = (root_dir / "motion_b").string();
    harness::run_train(mcfg_b);
    compare_runs(first_dir, root_dir / "motion_b");

    harness::run_eval(mcfg, ckpts, root_dir / "eval_a.csv", root_dir / "episodes_a.csv");
    harness::run_eval(mcfg, ckpts, root_dir / "eval_b.csv", root_dir / "episodes_b.csv");
    compare(root_dir / "eval_a.csv", root_dir / "eval_b.csv");
    compare(root_dir / "episodes_a.csv", root_dir / "episodes_b.csv");

    Line l;
    l.pass = differing == 0;
    l.detail = fmt("train+eval rerun, both modes: %d/%d artifact files bitwise identical",
                   compared - differing, compared);
    return l;
}

}  // namespace

int main() {
    std::printf("federated training stack: acceptance gate\n");
    std::fflush(stdout);

    struct Entry {
        int id;
        const char* name;
        Line line;
        double secs = 0.0;
    };
    std::vector<Entry> entries;
    MotionOut motion;

    auto timed = [&](int id, const char* name, const std::function<Line()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Line l;
        try {
            l = fn();
        } catch (const std::exception& e) {
            l.pass = false;
            l.detail = fmt("exception: %s", e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        entries.push_back({id, name, l, secs});
        std::printf("%s  criterion %2d  %-26s %s [%.1fs]\n", l.pass ? "PASS" : "FAIL", id, name,
                    l.detail.c_str(), secs);
        std::fflush(stdout);
    };

    timed(1, "bias-reference", criterion_bias_reference);
    timed(2, "upper-bound-calibration", criterion_upper_calibration);

    {
        const auto t0 = std::chrono::steady_clock::now();
        SyntheticCampaign camp;
        try {
            camp = criterion_synthetic_campaign();
        } catch (const std::exception& e) {
            camp.adoption = {false, fmt("exception: %s", e.what())};
            camp.stopping = {false, fmt("exception: %s", e.what())};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        entries.push_back({3, "adoption-count-bound", camp.adoption, secs});
        std::printf("%s  criterion %2d  %-26s %s [%.1fs]\n", camp.adoption.pass ? "PASS" : "FAIL",
                    3, "adoption-count-bound", camp.adoption.detail.c_str(), secs);
        entries.push_back({4, "stopping-convergence", camp.stopping, 0.0});
        std::printf("%s  criterion %2d  %-26s %s [same campaign]\n",
                    camp.stopping.pass ? "PASS" : "FAIL", 4, "stopping-convergence",
                    camp.stopping.detail.c_str());
        std::fflush(stdout);
    }

    {
        const auto t0 = std::chrono::steady_clock::now();
        ConsensusCampaign camp;
        try {
            camp = criterion_consensus_campaign();
        } catch (const std::exception& e) {
            camp.spread = {false, fmt("exception: %s", e.what())};
            camp.improvement = {false, fmt("exception: %s", e.what())};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        entries.push_back({5, "consensus-spread", camp.spread, secs});
        std::printf("%s  criterion %2d  %-26s %s [%.1fs]\n", camp.spread.pass ? "PASS" : "FAIL", 5,
                    "consensus-spread", camp.spread.detail.c_str(), secs);
        entries.push_back({6, "adopter-improvement", camp.improvement, 0.0});
        std::printf("%s  criterion %2d  %-26s %s [same campaign]\n",
                    camp.improvement.pass ? "PASS" : "FAIL", 6, "adopter-improvement",
                    camp.improvement.detail.c_str());
        std::fflush(stdout);
    }

    timed(7, "cloud-argmin-equivalence", criterion_cloud_equivalence);
    timed(8, "gradient-estimator",
          [] { return criterion_from_checks(verify::check_nes(910, 10000)); });
    timed(9, "sensor-oracle",
          [] { return criterion_from_checks(verify::check_sensor(911, 500, 1e-3)); });

    {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            motion = criterion_motion_campaign();
        } catch (const std::exception& e) {
            motion.line.pass = false;
            motion.line.detail = fmt("exception: %s", e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        entries.push_back({10, "motion-campaign", motion.line, secs});
        std::printf("%s  criterion %2d  %-26s %s [%.0fs]\n", motion.line.pass ? "PASS" : "FAIL",
                    10, "motion-campaign", motion.line.detail.c_str(), secs);
        std::fflush(stdout);
    }

    timed(11, "determinism", [&] { return criterion_determinism(motion); });

    int passed = 0;
    for (const auto& e : entries)
        if (e.line.pass) ++passed;
    std::printf("acceptance: %d/%zu criteria passed\n", passed, entries.size());
    return passed == static_cast<int>(entries.size()) ? 0 : 1;
}
