#include "fedgen/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedgen/bounds.hpp"
#include "fedgen/nes.hpp"
#include "fedgen/rng.hpp"
#include "fedgen/rollout.hpp"

namespace fedgen::verify {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

// Distance from point p to the segment a-b.
double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = ax + t * dx, qy = ay + t * dy;
    return std::hypot(px - qx, py - qy);
}

}  // namespace

double ray_march_distance(const EnvironmentSpec& env, double x1, double x2, double angle,
                          double range, double step) {
    const double dx = std::cos(angle), dy = std::sin(angle);
    const double ex = x1 + range * dx, ey = x2 + range * dy;

    // Only circles the ray segment can actually touch need per-sample tests.
    std::vector<const Obstacle*> near;
    for (const auto& o : env.obstacles) {
        if (segment_distance(o.cx, o.cy, x1, x2, ex, ey) <= o.r + 1e-9) near.push_back(&o);
    }

    const auto occupied = [&](double px, double py) {
        if (px <= arena::x1_min && py >= arena::x2_min && py <= arena::x2_max) return true;
        if (px >= arena::x1_max && py >= arena::x2_min && py <= arena::x2_max) return true;
        if (py <= arena::x2_min && px >= arena::x1_min && px <= arena::x1_max) return true;
        for (const Obstacle* o : near) {
            const double ddx = px - o->cx, ddy = py - o->cy;
            if (ddx * ddx + ddy * ddy <= o->r * o->r) return true;
        }
        return false;
    };

    const long n = static_cast<long>(std::floor(range / step));
    for (long i = 1; i <= n; ++i) {
        const double s = static_cast<double>(i) * step;
        if (occupied(x1 + s * dx, x2 + s * dy)) return s;
    }
    return range;
}

std::optional<CloudBest> brute_force_argmin(std::span<const Submission> history) {
    std::optional<CloudBest> best;
    for (const Submission& s : history) {
        const double key = s.y + s.b_gamma;
        bool take = false;
        if (!best) {
            take = true;
        } else if (key < best->key()) {
            take = true;
        } else if (key == best->key()) {
            if (s.learner < best->learner ||
                (s.learner == best->learner && s.iteration < best->iteration))
                take = true;
        }
        if (take) best = CloudBest{s.learner, s.iteration, s.y, s.b_gamma, s.theta};
    }
    return best;
}

ParamVector finite_difference_gradient(const std::function<double(const ParamVector&)>& fn,
                                       const ParamVector& at, double h) {
    ParamVector g(at.size()), p = at;
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double x = at[i];
        p[i] = x + h;
        const double up = fn(p);
        p[i] = x - h;
        const double dn = fn(p);
        p[i] = x;
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

// ---------------------------------------------------------------------------
// bounds suite

std::vector<CheckResult> check_bounds(std::uint64_t seed) {
    std::vector<CheckResult> out;
    RngStream rng(seed);

    {
        // Reference value recomputed in extended precision.
        const long double ref = sqrtl(logl(2.0L / 0.01L) / (2.0L * 10.0L));
        const double got = bounds::local_bias(0.01, 10, 1);
        const double err = std::fabs(got - static_cast<double>(ref));
        out.push_back({"bias_reference_value", err <= 1e-9,
                       fmt("b(0.01,10,1) = %.17g, long-double reference %.17g, |diff| = %.3g", got,
                           static_cast<double>(ref), err)});
    }

    {
        // local_bias must be exactly the generic deviation at n_env*n_init.
        bool ok = true;
        auto sub = rng.derive(1);
        for (int t = 0; t < 200 && ok; ++t) {
            const double g = sub.uniform(1e-4, 0.5);
            const int ne = sub.uniform_int(1, 100);
            const int ni = sub.uniform_int(1, 10);
            ok = bounds::local_bias(g, ne, ni) == bounds::hoeffding_deviation(ne * ni, g);
        }
        out.push_back({"bias_product_identity", ok,
                       ok ? "matches hoeffding_deviation(n_env*n_init) exactly on 200 draws"
                          : "mismatch against hoeffding_deviation(n_env*n_init)"});
    }

    {
        // Empirical coverage of the deviation bound on Bernoulli means, the
        // worst case for a [0,1] variable. The observed violation rate may
        // not exceed gamma by more than three binomial standard errors.
        const int trials = 100000;
        auto sub = rng.derive(2);
        bool ok = true;
        double worst_excess = -1.0;
        std::string worst = "none";
        for (const int n : {5, 20}) {
            for (const double gamma : {0.01, 0.1}) {
                const double dev = bounds::hoeffding_deviation(n, gamma);
                const double slack = 3.0 * std::sqrt(gamma * (1.0 - gamma) / trials);
                for (const double p : {0.1, 0.5, 0.9}) {
                    auto tr = sub.derive(n, static_cast<std::uint64_t>(gamma * 1000),
                                         static_cast<std::uint64_t>(p * 10));
                    int violations = 0;
                    for (int t = 0; t < trials; ++t) {
                        int ones = 0;
                        for (int i = 0; i < n; ++i) ones += tr.next_unit() < p ? 1 : 0;
                        const double mean = static_cast<double>(ones) / n;
                        if (std::fabs(mean - p) > dev) ++violations;
                    }
                    const double rate = static_cast<double>(violations) / trials;
                    const double excess = rate - (gamma + slack);
                    if (excess > worst_excess) {
                        worst_excess = excess;
                        worst = fmt("n=%d gamma=%g p=%g rate=%.5f limit=%.5f", n, gamma, p, rate,
                                    gamma + slack);
                    }
                    if (excess > 0.0) ok = false;
                }
            }
        }
        out.push_back({"deviation_coverage", ok, "tightest case: " + worst});
    }

    {
        // Certificate arithmetic and vacuity flags on random inputs.
        bool ok = true;
        auto sub = rng.derive(3);
        for (int t = 0; t < 200 && ok; ++t) {
            const double y = sub.next_unit();
            const double b = sub.uniform(0.0, 1.2);
            const double g = sub.uniform(1e-3, 0.3);
            const auto up = bounds::generalization_upper_bound(y, b, g);
            const auto lo = bounds::safe_arrival_lower_bound(y, b, g);
            ok = up.value == y + b && up.confidence == 1.0 - g && up.vacuous == (up.value >= 1.0) &&
                 lo.value == 1.0 - g - (1.0 - g) * (y + b) && lo.confidence == 1.0 - g &&
                 lo.vacuous == (lo.value <= 0.0);
        }
        const auto up = bounds::generalization_upper_bound(0.3704, 0.5147, 0.01);
        const auto lo = bounds::safe_arrival_lower_bound(0.3704, 0.5147, 0.01);
        ok = ok && std::fabs(up.value - 0.8851) < 1e-12 && std::fabs(lo.value - 0.113751) < 1e-12 &&
             !up.vacuous && !lo.vacuous;
        out.push_back({"certificate_algebra", ok,
                       fmt("upper(0.3704, 0.5147, 0.01) = %.6f, lower = %.6f", up.value, lo.value)});
    }

    {
        const std::vector<double> biases{0.1, 0.2, 0.05};
        const double cg = bounds::consensus_gap_bound(biases);
        const double im = bounds::improvement_bound(biases);
        const bool ok = cg == 0.4 && im == -0.1;
        out.push_back({"federation_gap_bounds", ok,
                       fmt("consensus gap %.3f (want 0.400), improvement %.3f (want -0.100)", cg, im)});
    }

    return out;
}

// ---------------------------------------------------------------------------
// optimizer suite

namespace {

LearnerState scripted_state(double theta, double y, double zeta, bool stopped) {
    LearnerState s;
    s.id = 0;
    s.theta = {theta};
    s.zeta = zeta;
    s.stopped = stopped;
    s.last = ObjectiveEstimate{y, {0.0}, std::nullopt};
    return s;
}

RoundProposal scripted_proposal(const LearnerState& s, const LearnerConfig& cfg, bool stopped_entering) {
    RoundProposal p;
    p.theta_hat = s.theta;
    p.submission = Submission{s.id, 0, s.last->y, cfg.b_gamma, s.theta};
    p.stopped_at_round_start = stopped_entering;
    return p;
}

}  // namespace

std::vector<CheckResult> check_optimizer(std::uint64_t seed) {
    std::vector<CheckResult> out;
    RngStream rng(seed);

    const LearnerConfig cfg = make_learner_config(0.1, 0.8, 0.04, 0.05, 200, 1);

    {
        // Strictly better external parameter, learner stopped: adopt.
        auto s = scripted_state(0.0, 0.9, 1.0, true);
        auto p = scripted_proposal(s, cfg, true);
        CloudBest bc{1, 3, 0.3, 0.1, {1.5}};
        const int from = fusion_apply(s, cfg, p, bc, 5);
        const bool ok = from == 1 && s.theta == ParamVector{1.5} && s.zeta == 0.3 && !s.stopped &&
                        s.adoptions.size() == 1 && s.adoptions[0].from_iteration == 3;
        out.push_back({"fusion_adopts_better_external", ok,
                       fmt("adopted_from=%d zeta=%.3f stopped=%d", from, s.zeta, int(s.stopped))});
    }

    {
        // Broadcast not strictly below own certified cost: keep.
        auto s = scripted_state(0.0, 0.3, 1.0, true);
        auto p = scripted_proposal(s, cfg, true);
        CloudBest bc{1, 3, 0.25, 0.05, {1.5}};  // 0.30 vs min(0.3 - b, 1.0)
        const int from = fusion_apply(s, cfg, p, bc, 5);
        const bool ok = from == -1 && s.theta == ParamVector{0.0} && s.stopped;
        out.push_back({"fusion_respects_own_cost", ok,
                       fmt("adopted_from=%d (want -1), theta=%.3f", from, s.theta[0])});
    }

    {
        // Same winning broadcast, but the learner only stopped this round:
        // adoption must wait until it enters a round already stopped.
        auto s = scripted_state(0.0, 0.9, 1.0, true);
        auto p = scripted_proposal(s, cfg, false);
        CloudBest bc{1, 3, 0.3, 0.1, {1.5}};
        const int from = fusion_apply(s, cfg, p, bc, 5);
        const bool ok = from == -1 && s.theta == ParamVector{0.0};
        out.push_back({"fusion_waits_one_round", ok, fmt("adopted_from=%d (want -1)", from)});
    }

    {
        // Own earlier adoption also gates: zeta remembers the best adopted y.
        auto s = scripted_state(0.0, 0.9, 0.2, true);
        auto p = scripted_proposal(s, cfg, true);
        CloudBest bc{1, 3, 0.18, 0.05, {1.5}};  // 0.23 >= min(0.85, 0.2)
        const int from = fusion_apply(s, cfg, p, bc, 5);
        const bool ok = from == -1 && s.theta == ParamVector{0.0};
        out.push_back({"fusion_respects_adopted_best", ok, fmt("adopted_from=%d (want -1)", from)});
    }

    {
        // Incremental cloud argmin == linear scan of the full history.
        auto sub = rng.derive(10);
        bool ok = true;
        CloudLedger ledger;
        std::vector<Submission> history;
        for (int t = 0; t < 400 && ok; ++t) {
            Submission s;
            s.learner = sub.uniform_int(0, 7);
            s.iteration = sub.uniform_int(0, 50);
            // Coarse grid so exact key ties actually occur.
            s.y = sub.uniform_int(0, 20) / 20.0;
            s.b_gamma = sub.uniform_int(0, 4) / 8.0;
            s.theta = {sub.uniform(-1.0, 1.0)};
            history.push_back(s);
            ledger.absorb(s);
            const auto want = brute_force_argmin(history);
            ok = want && ledger.best && want->learner == ledger.best->learner &&
                 want->iteration == ledger.best->iteration && want->y == ledger.best->y &&
                 want->b_gamma == ledger.best->b_gamma;
        }
        out.push_back({"cloud_argmin_matches_scan", ok,
                       ok ? "incremental best equals full-history scan over 400 submissions"
                          : "incremental best diverged from full-history scan"});
    }

    {
        // End-to-end federation on a two-well landscape: four learners, one
        // well clearly better, adoption spreads the good parameter.
        const auto obj = make_double_well(-1.0, 0.5, 1.0, 0.3, 0.6, 1.0);
        const LearnerConfig lc = make_learner_config(0.25, 0.8, 0.02, 0.05, 738, 1);
        const int V = 4, K = 400;
        std::vector<LearnerConfig> cfgs(V, lc);
        std::vector<SyntheticSampler> samplers;
        std::vector<const ObjectiveSampler*> ptrs;
        std::vector<ParamVector> theta0;
        auto sub = rng.derive(11);
        for (int i = 0; i < V; ++i) {
            samplers.emplace_back(obj, lc.n_env * lc.n_init, 0.2, 0.01,
                                  sub.derive(100 + i).next_u64());
            theta0.push_back({sub.uniform(-2.0, 2.0)});
        }
        for (auto& s : samplers) ptrs.push_back(&s);

        const RunResult res = run_fedgen(theta0, cfgs, ptrs, K);

        const std::vector<double> biases(V, lc.b_gamma);
        bool all_stopped = true;
        int adoptions = 0;
        double eta_min = 1.0, eta_max = 0.0;
        bool improvements_ok = true;
        for (const auto& lr : res.learners) {
            all_stopped = all_stopped && lr.state.stopped;
            adoptions += static_cast<int>(lr.state.adoptions.size());
            const double e = obj.eta(lr.state.theta);
            eta_min = std::min(eta_min, e);
            eta_max = std::max(eta_max, e);
            if (!lr.state.adoptions.empty()) {
                const double before = obj.eta(lr.state.theta_first_stop);
                if (!(e - before <= bounds::improvement_bound(biases))) improvements_ok = false;
            }
        }
        const double gap = eta_max - eta_min;
        const double gap_bound = bounds::consensus_gap_bound(biases);
        const int adopt_cap = static_cast<int>(std::floor(1.0 / lc.b_gamma));
        const bool ok = res.convergence_round.has_value() && all_stopped && gap <= gap_bound &&
                        adoptions <= adopt_cap && improvements_ok;
        out.push_back(
            {"federation_two_well", ok,
             fmt("converged_at=%d all_stopped=%d eta spread %.4f (bound %.4f) adoptions %d (cap %d)",
                 res.convergence_round.value_or(-1), int(all_stopped), gap, gap_bound, adoptions,
                 adopt_cap)});
    }

    return out;
}

// ---------------------------------------------------------------------------
// nes suite

std::vector<CheckResult> check_nes(std::uint64_t seed, int pairs) {
    std::vector<CheckResult> out;
    RngStream rng(seed);

    {
        // Hand-checkable two-evaluation case in one dimension. All values are
        // dyadic rationals so the expected outputs are exact:
        //   g_mu = (0.75 - 0.25) * 1 / (2 * 1) / 0.5 = 0.5, g_sigma = 0.
        const std::vector<double> f{0.75, 0.25};
        const std::vector<ParamVector> eps{{1.0}};
        const std::vector<double> sigma{0.5};
        const auto g = nes_gradients(f, eps, sigma);
        const bool ok = g.g_mu.size() == 1 && g.g_mu[0] == 0.5 && g.g_sigma[0] == 0.0;
        out.push_back({"estimator_hand_case", ok, fmt("g_mu=%.3f (want 0.5) g_sigma=%.3f (want 0)",
                                                      g.g_mu[0], g.g_sigma[0])});
    }

    {
        // Against central differences of the analytically smoothed quadratic
        //   E[f(mu + sigma*eps)] = f(mu) + sum_i a_i sigma_i^2.
        const std::size_t d = 10;
        auto sub = rng.derive(20);
        ParamVector a(d), c(d), mu(d), sigma(d);
        for (std::size_t i = 0; i < d; ++i) {
            a[i] = sub.uniform(0.5, 1.5);
            c[i] = sub.uniform(-1.0, 1.0);
            mu[i] = sub.uniform(-1.0, 1.0);
            sigma[i] = sub.uniform(0.05, 0.15);
        }
        const auto f = [&](const ParamVector& x) {
            double v = 0.2;
            for (std::size_t i = 0; i < d; ++i) v += a[i] * (x[i] - c[i]) * (x[i] - c[i]);
            return v;
        };
        const auto smoothed = [&](const ParamVector& m) {
            double v = f(m);
            for (std::size_t i = 0; i < d; ++i) v += a[i] * sigma[i] * sigma[i];
            return v;
        };

        std::vector<double> fs(2 * static_cast<std::size_t>(pairs));
        std::vector<ParamVector> eps(pairs);
        // Per-pair per-coordinate estimator samples, for standard errors.
        std::vector<ParamVector> c_mu(pairs, ParamVector(d)), c_sg(pairs, ParamVector(d));
        auto draws = sub.derive(21);
        ParamVector xp(d), xm(d);
        for (int p = 0; p < pairs; ++p) {
            eps[p].resize(d);
            auto pr = draws.derive(p);
            for (std::size_t i = 0; i < d; ++i) {
                eps[p][i] = pr.normal();
                xp[i] = mu[i] + sigma[i] * eps[p][i];
                xm[i] = mu[i] - sigma[i] * eps[p][i];
            }
            const double fp = f(xp), fm = f(xm);
            fs[2 * p] = fp;
            fs[2 * p + 1] = fm;
            for (std::size_t i = 0; i < d; ++i) {
                c_mu[p][i] = 0.5 * (fp - fm) * eps[p][i] / sigma[i];
                c_sg[p][i] = 0.5 * (fp + fm) * (eps[p][i] * eps[p][i] - 1.0) / sigma[i];
            }
        }
        const auto g = nes_gradients(fs, eps, sigma);

        const auto fd_mu = finite_difference_gradient(smoothed, mu, 1e-5);
        bool ok = true;
        double worst = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double mean = 0.0, ss = 0.0;
            for (int p = 0; p < pairs; ++p) mean += c_mu[p][i];
            mean /= pairs;
            for (int p = 0; p < pairs; ++p) ss += (c_mu[p][i] - mean) * (c_mu[p][i] - mean);
            const double se = std::sqrt(ss / (pairs - 1.0) / pairs);
            // The production estimator must agree with the per-pair mean...
            if (std::fabs(g.g_mu[i] - mean) > 1e-12) ok = false;
            // ...and the mean with the true smoothed gradient, statistically.
            const double dev = std::fabs(mean - fd_mu[i]) / (3.0 * se + 1e-12);
            worst = std::max(worst, dev);
            if (dev > 1.0) ok = false;

            // Same for the sigma block: d/dsigma_i E = 2 a_i sigma_i.
            double smean = 0.0, sss = 0.0;
            for (int p = 0; p < pairs; ++p) smean += c_sg[p][i];
            smean /= pairs;
            for (int p = 0; p < pairs; ++p) sss += (c_sg[p][i] - smean) * (c_sg[p][i] - smean);
            const double sse = std::sqrt(sss / (pairs - 1.0) / pairs);
            if (std::fabs(g.g_sigma[i] - smean) > 1e-12) ok = false;
            const double sdev = std::fabs(smean - 2.0 * a[i] * sigma[i]) / (3.0 * sse + 1e-12);
            worst = std::max(worst, sdev);
            if (sdev > 1.0) ok = false;
        }
        out.push_back({"estimator_matches_smoothed_gradient", ok,
                       fmt("%d pairs, worst |error| = %.2f of its 3-sigma budget", pairs, worst)});
    }

    {
        // Odd objective around mu with f(mu)=0: antithetic pairing cancels
        // the sigma gradient exactly, not just in expectation.
        const std::size_t d = 6;
        auto sub = rng.derive(22);
        ParamVector w(d), mu(d), sigma(d);
        for (std::size_t i = 0; i < d; ++i) {
            w[i] = sub.uniform(-2.0, 2.0);
            mu[i] = sub.uniform(-1.0, 1.0);
            sigma[i] = sub.uniform(0.05, 0.2);
        }
        const int P = 64;
        std::vector<double> fs(2 * P);
        std::vector<ParamVector> eps(P, ParamVector(d));
        for (int p = 0; p < P; ++p) {
            auto pr = sub.derive(100 + p);
            double fp = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                eps[p][i] = pr.normal();
                fp += w[i] * sigma[i] * eps[p][i];
            }
            fs[2 * p] = fp;
            fs[2 * p + 1] = -fp;
        }
        const auto g = nes_gradients(fs, eps, sigma);
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) ok = ok && g.g_sigma[i] == 0.0;
        out.push_back({"antithetic_sigma_cancellation", ok,
                       ok ? "g_sigma identically zero for an odd objective"
                          : "g_sigma nonzero for an odd objective"});
    }

    return out;
}

// ---------------------------------------------------------------------------
// sensor suite

std::vector<CheckResult> check_sensor(std::uint64_t seed, int scenes, double tol) {
    std::vector<CheckResult> out;
    RngStream rng(seed);

    const double step = 1e-4;
    SensorParams sensor;  // paper fan, 20 beams, range 5
    double worst = 0.0;
    int beams_checked = 0;
    std::string where = "none";

    for (int sc = 0; sc < scenes; ++sc) {
        auto sub = rng.derive(30, sc);
        const EnvironmentSpec env = sample_environment(sub.next_u64());

        RobotState pose;
        bool found = false;
        for (int tries = 0; tries < 200 && !found; ++tries) {
            pose.x1 = sub.uniform(-4.7, 4.7);
            pose.x2 = sub.uniform(0.3, 9.5);
            pose.x3 = sub.uniform(-3.141592653589793, 3.141592653589793);
            found = !in_collision(env, pose.x1, pose.x2, 0.0);
        }
        if (!found) continue;

        const auto got = sense(env, pose, sensor);
        for (int b = 0; b < sensor.beams; ++b) {
            const double angle = pose.x3 - 3.141592653589793 / 3.0 + b * (3.141592653589793 / 60.0);
            const double want = ray_march_distance(env, pose.x1, pose.x2, angle, sensor.range, step);
            const double err = std::fabs(got[b] - want);
            ++beams_checked;
            if (err > worst) {
                worst = err;
                where = fmt("scene %d beam %d: analytic %.6f vs marched %.6f", sc, b, got[b], want);
            }
        }
    }

    const bool ok = beams_checked > 0 && worst <= tol;
    out.push_back({"beam_distances_vs_marching",
                   ok,
                   fmt("%d beams, worst |diff| = %.2e (tolerance %.0e); %s", beams_checked, worst,
                       tol, where.c_str())});
    return out;
}

}  // namespace fedgen::verify
