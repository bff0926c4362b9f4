#include "fedgen/nes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedgen/parallel.hpp"

namespace fedgen {

namespace {

constexpr std::uint64_t kEpsTag = 0x4e4553ULL;    // "NES"
constexpr std::uint64_t kCaseTag = 0x43415345ULL; // "CASE"

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void validate_nes(const NesParams& p) {
    if (p.pairs <= 0) throw std::invalid_argument("nes: pairs must be positive");
    if (!(p.sigma_floor > 0.0)) throw std::invalid_argument("nes: sigma_floor must be positive");
    if (!(p.sigma_init >= p.sigma_floor))
        throw std::invalid_argument("nes: sigma_init must be at least sigma_floor");
}

}  // namespace

NesGradients nes_gradients(std::span<const double> f, std::span<const ParamVector> eps,
                           std::span<const double> sigma) {
    if (eps.empty()) throw std::invalid_argument("nes_gradients: needs at least one pair");
    if (f.size() != 2 * eps.size())
        throw std::invalid_argument("nes_gradients: expected two cost values per pair");
    const std::size_t n = sigma.size();
    for (const auto& e : eps)
        if (e.size() != n) throw std::invalid_argument("nes_gradients: eps/sigma size mismatch");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("nes_gradients: sigma entries must be positive");

    NesGradients g;
    g.g_mu.assign(n, 0.0);
    g.g_sigma.assign(n, 0.0);
    for (std::size_t p = 0; p < eps.size(); ++p) {
        const double fp = f[2 * p];
        const double fm = f[2 * p + 1];
        const ParamVector& e = eps[p];
        for (std::size_t i = 0; i < n; ++i) {
            g.g_mu[i] += (fp - fm) * e[i];
            g.g_sigma[i] += (fp + fm) * (e[i] * e[i] - 1.0);
        }
    }
    const double scale = 1.0 / (2.0 * static_cast<double>(eps.size()));
    for (std::size_t i = 0; i < n; ++i) {
        g.g_mu[i] *= scale / sigma[i];
        g.g_sigma[i] *= scale / sigma[i];
    }
    return g;
}

ParamVector make_nes_theta(std::span<const double> mu, std::span<const double> sigma) {
    if (mu.size() != sigma.size()) throw std::invalid_argument("make_nes_theta: mu/sigma size mismatch");
    ParamVector theta;
    theta.reserve(2 * mu.size());
    theta.insert(theta.end(), mu.begin(), mu.end());
    for (double s : sigma) {
        if (!(s > 0.0)) throw std::invalid_argument("make_nes_theta: sigma entries must be positive");
        theta.push_back(std::log(s));
    }
    return theta;
}

void split_nes_theta(std::span<const double> theta, std::span<double> mu, std::span<double> sigma,
                     double sigma_floor, std::uint64_t* clamped) {
    const std::size_t n = mu.size();
    if (sigma.size() != n || theta.size() != 2 * n)
        throw std::invalid_argument("split_nes_theta: size mismatch");
    for (std::size_t i = 0; i < n; ++i) mu[i] = theta[i];
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::exp(theta[n + i]);
        if (s < sigma_floor) {
            sigma[i] = sigma_floor;
            if (clamped) ++*clamped;
        } else {
            sigma[i] = s;
        }
    }
}

void clamp_nes_theta(std::span<double> theta, double sigma_floor) {
    if (theta.size() % 2 != 0) throw std::invalid_argument("clamp_nes_theta: odd-length vector");
    const double lo = std::log(sigma_floor);
    for (std::size_t i = theta.size() / 2; i < theta.size(); ++i)
        if (theta[i] < lo) theta[i] = lo;
}

MotionNesSampler::MotionNesSampler(MlpSpec mlp, NesParams nes, RolloutParams rollout,
                                   std::vector<EnvCase> batch, std::uint64_t seed, int threads)
    : mlp_(std::move(mlp)),
      nes_(nes),
      rollout_(rollout),
      fixed_batch_(std::move(batch)),
      seed_(seed),
      threads_(threads) {
    mlp_.validate();
    validate_nes(nes_);
    if (fixed_batch_.empty()) throw std::invalid_argument("motion sampler: empty environment batch");
}

MotionNesSampler::MotionNesSampler(MlpSpec mlp, NesParams nes, RolloutParams rollout,
                                   std::uint64_t master_seed, int learner, int n_env, int n_init,
                                   const DisturbanceParams& dist, int threads)
    : mlp_(std::move(mlp)),
      nes_(nes),
      rollout_(rollout),
      resample_(true),
      master_seed_(master_seed),
      learner_(learner),
      n_env_(n_env),
      n_init_(n_init),
      dist_(dist),
      threads_(threads) {
    mlp_.validate();
    validate_nes(nes_);
    if (n_env_ <= 0 || n_init_ <= 0)
        throw std::invalid_argument("motion sampler: n_env and n_init must be positive");
    seed_ = RngStream(master_seed).derive(kCaseTag, static_cast<std::uint64_t>(learner)).next_u64();
}

std::vector<MotionNesSampler::EnvCase> MotionNesSampler::build_cases(std::uint64_t master_seed,
                                                                     int learner, int n_env,
                                                                     int n_init,
                                                                     const DisturbanceParams& dist,
                                                                     std::uint64_t round_salt) {
    std::vector<EnvCase> cases;
    cases.reserve(static_cast<std::size_t>(n_env) * static_cast<std::size_t>(n_init));
    for (int e = 0; e < n_env; ++e) {
        const int index = static_cast<int>(round_salt) * n_env + e;
        const std::uint64_t seed = train_env_seed(master_seed, learner, index);
        EnvironmentSpec spec = sample_environment(seed, dist);
        DisturbanceField field(spec.seed, spec.disturbance);
        for (int m = 0; m < n_init; ++m) {
            RngStream rng = init_state_stream(spec, m);
            const InitialState s0 = sample_initial_state(spec, rng);
            cases.push_back(EnvCase{spec, field, RobotState{s0.x1, s0.x2, s0.x3}});
        }
    }
    return cases;
}

MotionNesSampler::BatchCost MotionNesSampler::evaluate_weights(std::span<const double> weights,
                                                               std::span<const EnvCase> cases) const {
    MlpScratch scratch;
    const SteeringPolicy policy = [&](std::span<const double> obs) {
        return mlp_forward(mlp_, weights, obs, scratch);
    };
    double sum_j = 0.0;
    double sum_jhat = 0.0;
    for (const auto& c : cases) {
        const RolloutResult r = run_rollout(c.spec, c.field, c.start, policy, rollout_);
        sum_j += r.J;
        sum_jhat += r.J_hat;
    }
    BatchCost out;
    out.mean_J = clamp01(sum_j / static_cast<double>(cases.size()));
    out.mean_J_hat = sum_jhat / static_cast<double>(cases.size());
    return out;
}

ObjectiveEstimate MotionNesSampler::sample(const ParamVector& theta, std::int64_t draw_key) const {
    const std::size_t n = param_count(mlp_);
    if (theta.size() != 2 * n)
        throw std::invalid_argument("motion sampler: theta must be concat(mu, log sigma)");
    if (!all_finite(theta))
        throw std::invalid_argument("motion sampler: theta contains a non-finite entry");

    ParamVector mu(n), sigma(n);
    std::uint64_t clamp_hits = 0;
    split_nes_theta(theta, mu, sigma, nes_.sigma_floor, &clamp_hits);
    if (clamp_hits) clamped_ += clamp_hits;

    std::vector<EnvCase> local_cases;
    std::span<const EnvCase> cases;
    if (resample_) {
        local_cases = build_cases(master_seed_, learner_, n_env_, n_init_, dist_,
                                  static_cast<std::uint64_t>(draw_key));
        cases = local_cases;
    } else {
        cases = fixed_batch_;
    }

    const RngStream root = RngStream(seed_).derive(kEpsTag, static_cast<std::uint64_t>(draw_key));
    std::vector<ParamVector> eps(static_cast<std::size_t>(nes_.pairs));
    for (int p = 0; p < nes_.pairs; ++p) {
        RngStream s = root.derive(static_cast<std::uint64_t>(p));
        eps[static_cast<std::size_t>(p)].resize(n);
        for (std::size_t i = 0; i < n; ++i) eps[static_cast<std::size_t>(p)][i] = s.normal();
    }

    const int evals = 2 * nes_.pairs;
    std::vector<double> f(static_cast<std::size_t>(evals), 0.0);
    BatchCost at_mu;
    // Slot `evals` measures the unperturbed policy; the rest are the pairs.
    parallel_for(evals + 1, threads_, [&](int slot) {
        if (slot == evals) {
            at_mu = evaluate_weights(mu, cases);
            return;
        }
        const std::size_t p = static_cast<std::size_t>(slot / 2);
        const double sign = (slot % 2 == 0) ? 1.0 : -1.0;
        ParamVector w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = mu[i] + sign * sigma[i] * eps[p][i];
        f[static_cast<std::size_t>(slot)] = evaluate_weights(w, cases).mean_J_hat;
    });

    const NesGradients g = nes_gradients(f, eps, sigma);
    ObjectiveEstimate est;
    est.y = at_mu.mean_J;
    est.y_hat = at_mu.mean_J_hat;
    est.z.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        est.z[i] = g.g_mu[i];
        est.z[n + i] = g.g_sigma[i] * sigma[i];  // chain rule into log-sigma coordinates
    }
    return est;
}

}  // namespace fedgen
