#include "fedgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedgen/parallel.hpp"

namespace fedgen {

double binomial_ci_halfwidth(double p, int n) {
    if (n <= 0) throw std::invalid_argument("binomial_ci_halfwidth: n must be positive");
    p = std::clamp(p, 0.0, 1.0);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

std::vector<EnvCase> build_eval_cases(std::uint64_t master_seed, int count,
                                      const DisturbanceParams& dist) {
    if (count <= 0) throw std::invalid_argument("build_eval_cases: count must be positive");
    std::vector<EnvCase> cases;
    cases.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        EnvironmentSpec spec = sample_environment(eval_env_seed(master_seed, i), dist);
        DisturbanceField field(spec.seed, spec.disturbance);
        RngStream rng = init_state_stream(spec, 0);
        const InitialState s0 = sample_initial_state(spec, rng);
        cases.push_back(EnvCase{std::move(spec), std::move(field), RobotState{s0.x1, s0.x2, s0.x3}});
    }
    return cases;
}

EvalReport evaluate_policy(const MlpSpec& mlp, std::span<const double> weights,
                           std::span<const EnvCase> cases, const RolloutParams& params,
                           std::uint64_t seed_label, std::vector<EvalEpisode>* episodes,
                           int threads) {
    if (cases.empty()) throw std::invalid_argument("evaluate_policy: empty case list");
    if (weights.size() != param_count(mlp))
        throw std::invalid_argument("evaluate_policy: weight vector does not match the net");

    std::vector<EvalEpisode> eps(cases.size());
    parallel_for(static_cast<int>(cases.size()), threads, [&](int i) {
        MlpScratch scratch;
        const SteeringPolicy policy = [&](std::span<const double> obs) {
            return mlp_forward(mlp, weights, obs, scratch);
        };
        const auto& c = cases[static_cast<std::size_t>(i)];
        const RolloutResult r = run_rollout(c.spec, c.field, c.start, policy, params);
        eps[static_cast<std::size_t>(i)] =
            EvalEpisode{c.spec.seed, r.outcome, r.steps, r.J, r.rho, r.J_hat};
    });

    EvalReport rep;
    rep.samples = static_cast<int>(cases.size());
    rep.seed = seed_label;
    int arrivals = 0;
    double sum_j = 0.0, sum_rho_cost = 0.0;
    for (const auto& e : eps) {
        sum_j += e.J;
        sum_rho_cost += 0.1 * e.rho;
        if (e.outcome == Outcome::arrived) ++arrivals;
    }
    rep.mean_J = sum_j / rep.samples;
    rep.mean_rho_cost = sum_rho_cost / rep.samples;
    rep.arrival_rate = static_cast<double>(arrivals) / rep.samples;
    rep.rate_ci = binomial_ci_halfwidth(rep.arrival_rate, rep.samples);
    rep.j_ci = binomial_ci_halfwidth(rep.mean_J, rep.samples);
    if (episodes) *episodes = std::move(eps);
    return rep;
}

}  // namespace fedgen
