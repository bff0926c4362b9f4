#include "fedgen/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fedgen::bounds {

namespace {

void require_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1), got " + std::to_string(gamma));
}

void require_unit_interval(double y) {
    if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("empirical cost y must lie in [0,1], got " + std::to_string(y));
}

void require_bias(double b) {
    if (!(b >= 0.0))
        throw std::invalid_argument("bias must be non-negative, got " + std::to_string(b));
}

}  // namespace

double hoeffding_deviation(int n_samples, double gamma) {
    require_gamma(gamma);
    if (n_samples <= 0)
        throw std::invalid_argument("sample count must be positive, got " + std::to_string(n_samples));
    return std::sqrt(std::log(2.0 / gamma) / (2.0 * static_cast<double>(n_samples)));
}

double local_bias(double gamma, int n_env, int n_init) {
    if (n_env <= 0 || n_init <= 0)
        throw std::invalid_argument("n_env and n_init must be positive");
    return hoeffding_deviation(n_env * n_init, gamma);
}

Certificate generalization_upper_bound(double y, double b_gamma, double gamma) {
    require_gamma(gamma);
    require_unit_interval(y);
    require_bias(b_gamma);
    Certificate c;
    c.value = y + b_gamma;
    c.confidence = 1.0 - gamma;
    c.vacuous = c.value >= 1.0;
    return c;
}

Certificate safe_arrival_lower_bound(double y, double b_gamma, double gamma) {
    require_gamma(gamma);
    require_unit_interval(y);
    require_bias(b_gamma);
    Certificate c;
    c.value = 1.0 - gamma - (1.0 - gamma) * (y + b_gamma);
    c.confidence = 1.0 - gamma;
    c.vacuous = c.value <= 0.0;
    return c;
}

double consensus_gap_bound(std::span<const double> biases) {
    if (biases.empty()) throw std::invalid_argument("bias list must not be empty");
    for (double b : biases) require_bias(b);
    return 2.0 * *std::max_element(biases.begin(), biases.end());
}

double improvement_bound(std::span<const double> biases) {
    if (biases.empty()) throw std::invalid_argument("bias list must not be empty");
    for (double b : biases) require_bias(b);
    return -2.0 * *std::min_element(biases.begin(), biases.end());
}

}  // namespace fedgen::bounds
