#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fedgen/objective.hpp"
#include "fedgen/types.hpp"

namespace fedgen {

// Per-learner hyperparameters. b_gamma is derived from (gamma, n_env, n_init)
// by make_learner_config and travels with every cloud submission.
struct LearnerConfig {
    double r = 0.01;      // step scale; round-k step is r / k^rho
    double rho = 0.8;     // step decay exponent, must lie in (2/3, 1)
    double q = 0.04;      // stop threshold on the gradient-estimate norm
    double gamma = 0.01;  // certificate failure probability
    int n_env = 10;
    int n_init = 1;
    double b_gamma = 0.0;
    // Number of leading coordinates of z entering the stop norm; 0 means all.
    // Policy-search mode sets this to the mu-block size because the
    // sigma-block estimator noise never decays and would mask convergence.
    std::size_t stop_dims = 0;
};

LearnerConfig make_learner_config(double r, double rho, double q, double gamma, int n_env,
                                  int n_init, std::size_t stop_dims = 0);

double step_size(const LearnerConfig& cfg, int k);

double stop_norm(std::span<const double> z, std::size_t stop_dims);

struct AdoptEvent {
    int round = 0;
    int from_learner = -1;
    int from_iteration = -1;
    double y_adopted = 0.0;
};

struct LearnerState {
    int id = 0;
    ParamVector theta;
    double zeta = 1.0;     // best adopted cost so far; starts at the trivial bound
    bool stopped = false;
    std::optional<ObjectiveEstimate> last;  // most recent (possibly carried) measurement

    // Snapshot taken the first time the stop test fails: the parameter the
    // learner settled on by pure local descent. first_stop_iteration is the
    // index of the failing measurement (round - 1).
    std::optional<int> first_stop_iteration;
    ParamVector theta_first_stop;
    double y_first_stop = 0.0;

    std::vector<AdoptEvent> adoptions;
};

struct Submission {
    int learner = 0;
    int iteration = 0;  // measurement index: round - 1
    double y = 0.0;
    double b_gamma = 0.0;
    ParamVector theta;
};

struct CloudBest {
    int learner = 0;
    int iteration = 0;
    double y = 0.0;
    double b_gamma = 0.0;
    ParamVector theta;
    double key() const { return y + b_gamma; }
};

// Running argmin over every submission ever made. absorb() keeps the entry
// with the smallest y + b_gamma; exact ties prefer the lowest learner id,
// then the earliest iteration. Equivalent to re-scanning the full submission
// history each round, but needs only O(1) state.
struct CloudLedger {
    std::optional<CloudBest> best;
    std::uint64_t submissions_seen = 0;

    void absorb(const Submission& s);
};

std::optional<CloudBest> cloud_update(CloudLedger& ledger, std::span<const Submission> submissions);

// What one learner produced during the local phase of a round.
struct RoundProposal {
    ParamVector theta_hat;
    Submission submission;
    bool stopped_at_round_start = false;
    double z_norm = 0.0;  // the norm the stop test used
    bool sampled = false;
};

// Local phase of round k (k >= 1): draw a fresh measurement unless stopped,
// apply the decaying gradient step if the stop norm is still >= q, otherwise
// freeze and mark stopped. Mutates state.last / state.stopped / the
// first-stop snapshot but not state.theta (fusion_apply owns that).
RoundProposal learner_round(LearnerState& state, const LearnerConfig& cfg,
                            const ObjectiveSampler& sampler, int k);

// Fusion phase of round k: adopt the broadcast parameter iff it comes from
// another learner, its certified cost clears both the learner's own
// measurement (less its bias) and the best cost adopted so far, and the
// learner was already stopped when the round began. Returns the id of the
// learner adopted from, or -1. On adoption zeta drops to the broadcast y and
// the learner resumes sampling next round; otherwise theta_hat is committed.
int fusion_apply(LearnerState& state, const LearnerConfig& cfg, const RoundProposal& proposal,
                 const std::optional<CloudBest>& broadcast, int k);

struct RoundRecord {
    int round = 0;
    int learner = 0;
    double y = 0.0;
    double z_norm = 0.0;
    double zeta = 1.0;
    bool stopped = false;
    int adopted_from = -1;
    std::optional<double> y_hat;
};

struct LearnerResult {
    LearnerState state;       // end-of-run state (theta is theta_final)
    ParamVector theta_init;
    double y_init = 0.0;      // first measured cost at theta_init
    std::vector<RoundRecord> rounds;
};

struct RunResult {
    std::vector<LearnerResult> learners;
    CloudLedger ledger;
    // Round after which every learner stayed stopped and no adoption fired;
    // empty if activity continued through the final round.
    std::optional<int> convergence_round;
};

using RoundObserver = std::function<void(const RoundRecord&)>;

// Full federation run: `rounds` iterations of local phase, cloud argmin,
// fusion. Learner i draws from samplers[i]; all samplers must share one
// dimension. The observer, when set, sees every RoundRecord in (round,
// learner) order.
RunResult run_fedgen(std::vector<ParamVector> theta0, std::span<const LearnerConfig> cfgs,
                     std::span<const ObjectiveSampler* const> samplers, int rounds,
                     const RoundObserver& observer = {}, int threads = 1);

// Advisory checks relating the configuration to measured noise and curvature.
// Returns human-readable warnings; never blocks a run.
std::vector<std::string> validate_config(std::span<const LearnerConfig> cfgs,
                                         std::span<const double> sigma_hats,
                                         std::optional<double> grad_lipschitz);

}  // namespace fedgen
