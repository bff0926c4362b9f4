#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedgen/algorithm.hpp"
#include "fedgen/envgen.hpp"
#include "fedgen/types.hpp"

namespace fedgen::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Independent oracles. Each one re-derives a quantity the production code
// computes, by a different route, so agreement is evidence and not tautology.

// Occupancy marching along a ray: the first sampled arc length (multiples of
// `step`) whose point lies inside an obstacle or on the far side of a wall
// segment, capped at `range`.
double ray_march_distance(const EnvironmentSpec& env, double x1, double x2, double angle,
                          double range, double step);

// Full-history argmin over submissions with the (y+b, learner, iteration)
// tie order, computed by plain linear scan.
std::optional<CloudBest> brute_force_argmin(std::span<const Submission> history);

// Central differences, exact for quadratics up to roundoff.
ParamVector finite_difference_gradient(const std::function<double(const ParamVector&)>& fn,
                                       const ParamVector& at, double h);

// Named suites behind the `verify` command. Each returns one entry per check.
std::vector<CheckResult> check_bounds(std::uint64_t seed);
std::vector<CheckResult> check_optimizer(std::uint64_t seed);
std::vector<CheckResult> check_nes(std::uint64_t seed, int pairs = 2000);
std::vector<CheckResult> check_sensor(std::uint64_t seed, int scenes = 100, double tol = 1e-3);

}  // namespace fedgen::verify
