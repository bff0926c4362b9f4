#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedgen/policy.hpp"
#include "fedgen/rollout.hpp"

namespace fedgen {

struct EvalEpisode {
    std::uint64_t env_seed = 0;
    Outcome outcome = Outcome::timeout;
    int steps = 0;
    double J = 1.0;
    double rho = 0.0;
    double J_hat = 1.0;
};

struct EvalReport {
    int samples = 0;
    std::uint64_t seed = 0;
    double mean_J = 0.0;
    double mean_rho_cost = 0.0;  // mean of the 0.1*rho term
    double arrival_rate = 0.0;
    double rate_ci = 0.0;  // binomial 95% half-width on the arrival rate
    double j_ci = 0.0;     // the same half-width formula at p = mean_J, valid
                           // for [0,1] variables since var <= p(1-p)
};

// 95% normal-approximation half-width for a mean of n [0,1] samples.
double binomial_ci_halfwidth(double p, int n);

// Fresh unseen environments for evaluation, one start state per environment,
// drawn from the eval-tagged seed stream (disjoint from training corpora).
std::vector<EnvCase> build_eval_cases(std::uint64_t master_seed, int count,
                                      const DisturbanceParams& dist);

EvalReport evaluate_policy(const MlpSpec& mlp, std::span<const double> weights,
                           std::span<const EnvCase> cases, const RolloutParams& params,
                           std::uint64_t seed_label, std::vector<EvalEpisode>* episodes = nullptr,
                           int threads = 1);

}  // namespace fedgen
