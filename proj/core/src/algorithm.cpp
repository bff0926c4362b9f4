#include "fedgen/algorithm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "fedgen/bounds.hpp"
#include "fedgen/parallel.hpp"

namespace fedgen {

LearnerConfig make_learner_config(double r, double rho, double q, double gamma, int n_env,
                                  int n_init, std::size_t stop_dims) {
    if (!(r > 0.0)) throw std::invalid_argument("learner config: r must be positive");
    if (!(rho > 2.0 / 3.0 && rho < 1.0))
        throw std::invalid_argument("learner config: rho must lie in (2/3, 1), got " + std::to_string(rho));
    if (!(q > 0.0)) throw std::invalid_argument("learner config: q must be positive");
    LearnerConfig cfg;
    cfg.r = r;
    cfg.rho = rho;
    cfg.q = q;
    cfg.gamma = gamma;
    cfg.n_env = n_env;
    cfg.n_init = n_init;
    cfg.b_gamma = bounds::local_bias(gamma, n_env, n_init);  // validates gamma and counts
    cfg.stop_dims = stop_dims;
    return cfg;
}

double step_size(const LearnerConfig& cfg, int k) {
    if (k < 1) throw std::invalid_argument("step_size: round index must be >= 1");
    return cfg.r / std::pow(static_cast<double>(k), cfg.rho);
}

double stop_norm(std::span<const double> z, std::size_t stop_dims) {
    if (stop_dims == 0 || stop_dims >= z.size()) return l2_norm(z);
    return l2_norm(z.subspan(0, stop_dims));
}

void CloudLedger::absorb(const Submission& s) {
    ++submissions_seen;
    const double key = s.y + s.b_gamma;
    if (!best || key < best->key() ||
        (key == best->key() &&
         (s.learner < best->learner ||
          (s.learner == best->learner && s.iteration < best->iteration)))) {
        best = CloudBest{s.learner, s.iteration, s.y, s.b_gamma, s.theta};
    }
}

std::optional<CloudBest> cloud_update(CloudLedger& ledger, std::span<const Submission> submissions) {
    for (const auto& s : submissions) ledger.absorb(s);
    return ledger.best;
}

RoundProposal learner_round(LearnerState& state, const LearnerConfig& cfg,
                            const ObjectiveSampler& sampler, int k) {
    if (k < 1) throw std::invalid_argument("learner_round: round index must be >= 1");

    RoundProposal out;
    out.stopped_at_round_start = state.stopped;

    if (!state.stopped) {
        ObjectiveEstimate est = sampler.sample(state.theta, k);
        check_estimate(est, state.theta.size());
        state.last = std::move(est);
        out.sampled = true;
    } else if (!state.last) {
        throw std::logic_error("learner_round: stopped learner has no stored measurement");
    }

    out.submission = Submission{state.id, k - 1, state.last->y, cfg.b_gamma, state.theta};
    out.z_norm = stop_norm(state.last->z, cfg.stop_dims);

    if (!state.stopped && out.z_norm >= cfg.q) {
        const double step = step_size(cfg, k);
        out.theta_hat = state.theta;
        for (std::size_t i = 0; i < out.theta_hat.size(); ++i)
            out.theta_hat[i] -= step * state.last->z[i];
        sampler.project(out.theta_hat);
        if (!all_finite(out.theta_hat))
            throw std::runtime_error("learner_round: gradient step produced a non-finite parameter");
    } else {
        out.theta_hat = state.theta;
        if (!state.stopped) {
            state.stopped = true;
            if (!state.first_stop_iteration) {
                state.first_stop_iteration = k - 1;
                state.theta_first_stop = state.theta;
                state.y_first_stop = state.last->y;
            }
        }
    }
    return out;
}

int fusion_apply(LearnerState& state, const LearnerConfig& cfg, const RoundProposal& proposal,
                 const std::optional<CloudBest>& broadcast, int k) {
    if (broadcast && proposal.stopped_at_round_start && broadcast->learner != state.id) {
        if (!state.last) throw std::logic_error("fusion_apply: stopped learner has no stored measurement");
        const double own_floor = std::min(state.last->y - cfg.b_gamma, state.zeta);
        if (broadcast->key() < own_floor) {
            state.theta = broadcast->theta;
            state.zeta = broadcast->y;
            state.stopped = false;
            state.adoptions.push_back(AdoptEvent{k, broadcast->learner, broadcast->iteration, broadcast->y});
            return broadcast->learner;
        }
    }
    state.theta = proposal.theta_hat;
    return -1;
}

RunResult run_fedgen(std::vector<ParamVector> theta0, std::span<const LearnerConfig> cfgs,
                     std::span<const ObjectiveSampler* const> samplers, int rounds,
                     const RoundObserver& observer, int threads) {
    const std::size_t v = theta0.size();
    if (v == 0) throw std::invalid_argument("run_fedgen: needs at least one learner");
    if (cfgs.size() != v || samplers.size() != v)
        throw std::invalid_argument("run_fedgen: theta0/cfgs/samplers size mismatch");
    if (rounds < 0) throw std::invalid_argument("run_fedgen: rounds must be >= 0");

    const std::size_t dim = theta0[0].size();
    for (std::size_t i = 0; i < v; ++i) {
        if (theta0[i].size() != dim)
            throw std::invalid_argument("run_fedgen: learners disagree on parameter dimension");
        if (samplers[i] == nullptr || samplers[i]->dimension() != dim)
            throw std::invalid_argument("run_fedgen: sampler dimension mismatch");
        if (!all_finite(theta0[i]))
            throw std::invalid_argument("run_fedgen: non-finite initial parameter");
    }

    RunResult result;
    result.learners.resize(v);
    std::vector<LearnerState> states(v);
    for (std::size_t i = 0; i < v; ++i) {
        states[i].id = static_cast<int>(i);
        states[i].theta = theta0[i];
        result.learners[i].theta_init = std::move(theta0[i]);
        result.learners[i].rounds.reserve(static_cast<std::size_t>(rounds));
    }

    std::vector<RoundProposal> proposals(v);
    int last_active_round = 0;

    for (int k = 1; k <= rounds; ++k) {
        parallel_for(static_cast<int>(v), threads, [&](int i) {
            proposals[static_cast<std::size_t>(i)] =
                learner_round(states[static_cast<std::size_t>(i)], cfgs[static_cast<std::size_t>(i)],
                              *samplers[static_cast<std::size_t>(i)], k);
        });

        std::vector<Submission> subs;
        subs.reserve(v);
        for (const auto& p : proposals) subs.push_back(p.submission);
        const std::optional<CloudBest> broadcast = cloud_update(result.ledger, subs);

        bool any_adoption = false;
        bool any_running = false;
        for (std::size_t i = 0; i < v; ++i) {
            const int adopted_from = fusion_apply(states[i], cfgs[i], proposals[i], broadcast, k);
            any_adoption |= adopted_from >= 0;
            any_running |= !proposals[i].stopped_at_round_start;

            RoundRecord rec;
            rec.round = k;
            rec.learner = static_cast<int>(i);
            rec.y = states[i].last->y;
            rec.z_norm = proposals[i].z_norm;
            rec.zeta = states[i].zeta;
            rec.stopped = states[i].stopped;
            rec.adopted_from = adopted_from;
            rec.y_hat = states[i].last->y_hat;
            if (k == 1) result.learners[i].y_init = rec.y;
            result.learners[i].rounds.push_back(rec);
            if (observer) observer(rec);
        }
        if (any_adoption || any_running) last_active_round = k;
    }

    for (std::size_t i = 0; i < v; ++i) result.learners[i].state = std::move(states[i]);
    if (rounds > 0 && last_active_round < rounds) result.convergence_round = last_active_round;
    return result;
}

std::vector<std::string> validate_config(std::span<const LearnerConfig> cfgs,
                                         std::span<const double> sigma_hats,
                                         std::optional<double> grad_lipschitz) {
    std::vector<std::string> warnings;
    char buf[256];
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        const auto& c = cfgs[i];
        if (!sigma_hats.empty() && i < sigma_hats.size() && c.q < 4.0 * sigma_hats[i]) {
            std::snprintf(buf, sizeof(buf),
                          "learner %zu: stop threshold q=%g is below 4*sigma_hat=%g; gradient noise "
                          "alone may keep the stop test from ever firing",
                          i, c.q, 4.0 * sigma_hats[i]);
            warnings.emplace_back(buf);
        }
        if (grad_lipschitz && *grad_lipschitz > 0.0 && c.r > 1.0 / (2.0 * *grad_lipschitz)) {
            std::snprintf(buf, sizeof(buf),
                          "learner %zu: step scale r=%g exceeds 1/(2L)=%g for gradient-Lipschitz "
                          "constant L=%g; early rounds may overshoot",
                          i, c.r, 1.0 / (2.0 * *grad_lipschitz), *grad_lipschitz);
            warnings.emplace_back(buf);
        }
        if (c.b_gamma >= 1.0) {
            std::snprintf(buf, sizeof(buf),
                          "learner %zu: b_gamma=%g >= 1, every certificate on [0,1] costs is vacuous "
                          "(increase n_env*n_init or gamma)",
                          i, c.b_gamma);
            warnings.emplace_back(buf);
        }
    }
    return warnings;
}

}  // namespace fedgen
