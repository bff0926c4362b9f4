#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedgen {

// Flat parameter vector. In policy-search mode this is concat(mu, log_sigma);
// in synthetic mode it is the raw decision variable.
using ParamVector = std::vector<double>;

// One stochastic measurement of the objective at a fixed parameter vector:
// y is the empirical cost in [0,1], z the gradient estimate. y_hat optionally
// carries the surrogate (shaped) cost that the gradient was taken on.
struct ObjectiveEstimate {
    double y = 0.0;
    ParamVector z;
    std::optional<double> y_hat;
};

inline double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// Validates an estimate against the measurement contract. Throws
// std::invalid_argument so a bad sampler fails loudly instead of corrupting
// a run.
inline void check_estimate(const ObjectiveEstimate& e, std::size_t dim) {
    if (!std::isfinite(e.y) || e.y < 0.0 || e.y > 1.0)
        throw std::invalid_argument("objective estimate: y outside [0,1]: y=" + std::to_string(e.y));
    if (e.z.size() != dim)
        throw std::invalid_argument("objective estimate: z has dimension " + std::to_string(e.z.size()) +
                                    ", expected " + std::to_string(dim));
    if (!all_finite(e.z))
        throw std::invalid_argument("objective estimate: z contains a non-finite entry");
}

}  // namespace fedgen
