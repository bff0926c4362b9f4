#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "fedgen/envgen.hpp"
#include "fedgen/objective.hpp"
#include "fedgen/policy.hpp"
#include "fedgen/rollout.hpp"

namespace fedgen {

struct NesParams {
    int pairs = 15;            // antithetic pairs per measurement (2*pairs evaluations)
    double sigma_init = 0.05;
    double sigma_floor = 1e-3;
};

// Search-distribution gradient estimates for a Gaussian N(mu, diag(sigma^2)):
//   g_mu    = mean(f * eps) / sigma
//   g_sigma = mean(f * (eps*eps - 1)) / sigma
// where the mean runs over all 2*pairs evaluations, f[2p] belonging to
// mu + sigma*eps_p and f[2p+1] to mu - sigma*eps_p.
struct NesGradients {
    ParamVector g_mu;
    ParamVector g_sigma;
};

NesGradients nes_gradients(std::span<const double> f, std::span<const ParamVector> eps,
                           std::span<const double> sigma);

// Learner-facing encoding of the search distribution: concat(mu, log sigma).
// Storing log sigma keeps sigma positive under additive gradient updates; the
// floor bounds it away from zero. Everything user-visible reports sigma
// itself.
ParamVector make_nes_theta(std::span<const double> mu, std::span<const double> sigma);
void split_nes_theta(std::span<const double> theta, std::span<double> mu, std::span<double> sigma,
                     double sigma_floor, std::uint64_t* clamped = nullptr);
// Re-applies the floor to the log-sigma half after a parameter update so the
// stored vector cannot drift arbitrarily far below the floor.
void clamp_nes_theta(std::span<double> theta, double sigma_floor);

// One learner's motion-planning objective: the policy net evaluated over a
// batch of (environment, start state) cases. y is the mean plain arrival
// cost at mu (the certified quantity), the gradient is taken on the shaped
// cost 0.1*rho + J via the antithetic estimator above, and y_hat reports the
// shaped cost at mu. z is concat(g_mu, g_sigma * sigma), the gradient in the
// concat(mu, log sigma) coordinates.
class MotionNesSampler : public ObjectiveSampler {
  public:
    using EnvCase = fedgen::EnvCase;

    // Fixed corpus: the batch is evaluated as given every round.
    MotionNesSampler(MlpSpec mlp, NesParams nes, RolloutParams rollout, std::vector<EnvCase> batch,
                     std::uint64_t seed, int threads = 1);

    // Resampling mode: a fresh batch of n_env*n_init cases is drawn per
    // draw_key from the learner's tagged seed stream.
    MotionNesSampler(MlpSpec mlp, NesParams nes, RolloutParams rollout, std::uint64_t master_seed,
                     int learner, int n_env, int n_init, const DisturbanceParams& dist,
                     int threads = 1);

    std::size_t dimension() const override { return 2 * param_count(mlp_); }
    ObjectiveEstimate sample(const ParamVector& theta, std::int64_t draw_key) const override;
    void project(ParamVector& theta) const override { clamp_nes_theta(theta, nes_.sigma_floor); }

    const MlpSpec& mlp() const { return mlp_; }
    const NesParams& nes() const { return nes_; }
    std::uint64_t sigma_floor_hits() const { return clamped_.load(); }

    // Mean plain/shaped cost of the policy mu over a batch of cases.
    struct BatchCost {
        double mean_J = 0.0;
        double mean_J_hat = 0.0;
    };
    BatchCost evaluate_weights(std::span<const double> weights,
                               std::span<const EnvCase> cases) const;

    static std::vector<EnvCase> build_cases(std::uint64_t master_seed, int learner, int n_env,
                                            int n_init, const DisturbanceParams& dist,
                                            std::uint64_t round_salt = 0);

  private:
    MlpSpec mlp_;
    NesParams nes_;
    RolloutParams rollout_;
    std::vector<EnvCase> fixed_batch_;
    bool resample_ = false;
    std::uint64_t master_seed_ = 0;
    int learner_ = 0;
    int n_env_ = 0;
    int n_init_ = 0;
    DisturbanceParams dist_;
    std::uint64_t seed_ = 0;
    int threads_ = 1;
    mutable std::atomic<std::uint64_t> clamped_{0};
};

}  // namespace fedgen
