#pragma once

#include <span>

namespace fedgen::bounds {

// Two-sided Hoeffding deviation for the mean of n i.i.d. samples in [0,1]:
// with probability at least 1-gamma, |mean - E| <= sqrt(ln(2/gamma)/(2n)).
double hoeffding_deviation(int n_samples, double gamma);

// Concentration slack of a learner's empirical cost over its corpus of
// n_env environments times n_init initial states. Identical to
// hoeffding_deviation(n_env*n_init, gamma); kept as a named entry point
// because it is the quantity learners attach to every cloud submission.
double local_bias(double gamma, int n_env, int n_init);

// A probabilistic bound together with its confidence level. Vacuous bounds
// (upper bound >= 1 or lower bound <= 0 for quantities living in [0,1]) are
// returned as computed and only flagged; callers decide how to present them.
struct Certificate {
    double value = 0.0;
    double confidence = 0.0;
    bool vacuous = false;
};

// Upper bound on the expected cost in unseen environments: eta <= y + b
// with probability >= 1 - gamma. Requires y in [0,1].
Certificate generalization_upper_bound(double y, double b_gamma, double gamma);

// Lower bound on the probability that a fresh rollout reaches the goal
// without collision: >= 1 - gamma - (1-gamma)*(y + b). Requires y in [0,1].
Certificate safe_arrival_lower_bound(double y, double b_gamma, double gamma);

// Bound on the spread of expected costs across learners after the federation
// settles: max_i eta_i - min_j eta_j <= 2 * max_i b_i.
double consensus_gap_bound(std::span<const double> biases);

// Bound on the cost change of any learner that switched to a broadcast
// parameter: eta_after - eta_before <= -2 * min_i b_i (an improvement).
double improvement_bound(std::span<const double> biases);

}  // namespace fedgen::bounds
