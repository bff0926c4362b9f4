#include <doctest.h>

#include <cmath>
#include <vector>

#include "fedgen/objective.hpp"
#include "fedgen/rng.hpp"

using namespace fedgen;

TEST_SUITE_BEGIN("objective");

TEST_CASE("quadratic well landscape and gradient") {
    const auto obj = make_quadratic_well(2, 0.5, 1.0);
    CHECK(obj.eta({0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(obj.eta({1.5, 0.5}) == doctest::Approx(1.0));  // clamped at the top
    CHECK(obj.eta({0.5, 1.0}) == doctest::Approx(0.25));

    const auto g = obj.grad_eta({0.7, 0.5});
    CHECK(g[0] == doctest::Approx(0.4));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(obj.grad_lipschitz() == doctest::Approx(2.0));
}

TEST_CASE("clamp saturation zeroes the gradient") {
    const auto obj = make_quadratic_well(1, 0.0, 1.0);
    // eta(3) = 9 clamps to 1; the reported landscape is flat there.
    CHECK(obj.eta({3.0}) == doctest::Approx(1.0));
    CHECK(obj.grad_eta({3.0})[0] == doctest::Approx(0.0));
    CHECK(obj.grad_eta({0.3})[0] == doctest::Approx(0.6));
}

TEST_CASE("double well picks the active piece") {
    // eta = clamp01(0.6 + min((x+1)^2 - 0.5, (x-1)^2 - 0.3))
    const auto obj = make_double_well(-1.0, 0.5, 1.0, 0.3, 0.6, 1.0);
    CHECK(obj.eta({-1.0}) == doctest::Approx(0.1));
    CHECK(obj.eta({1.0}) == doctest::Approx(0.3));
    // Near the deep center the deep piece is active.
    CHECK(obj.grad_eta({-0.8})[0] == doctest::Approx(0.4));
    // Near the shallow center the shallow piece is active.
    CHECK(obj.grad_eta({1.2})[0] == doctest::Approx(0.4));
    CHECK(obj.eta({-0.9}) == doctest::Approx(0.6 + 0.01 - 0.5));
}

TEST_CASE("objective validation") {
    SyntheticObjective obj;
    obj.dim = 2;
    obj.centers = {{0.0, 0.0}};
    obj.depths = {0.1, 0.2};  // length mismatch
    CHECK_THROWS(obj.validate());
    obj.depths = {0.1};
    CHECK_NOTHROW(obj.validate());
    obj.centers = {{0.0}};  // wrong dimension
    CHECK_THROWS(obj.validate());
}

TEST_CASE("sampler output contract") {
    const auto obj = make_quadratic_well(3, 0.0, 1.0);
    const SyntheticSampler s(obj, 50, 0.3, 0.02, 99);

    const ParamVector theta{0.4, -0.2, 0.1};
    const auto a = s.sample(theta, 7);
    const auto b = s.sample(theta, 7);
    const auto c = s.sample(theta, 8);

    CHECK(a.y == b.y);  // same draw key, bit-identical
    CHECK(a.z == b.z);
    CHECK(a.y != c.y);  // fresh key, fresh noise

    CHECK(a.y >= 0.0);
    CHECK(a.y <= 1.0);
    CHECK(a.z.size() == 3);

    // Gradient noise is the mean of 50 N(0, 0.02) draws per coordinate, so
    // each component sits within a generous 8-sigma band of the true grad.
    const auto g = obj.grad_eta(theta);
    const double band = 8.0 * 0.02 / std::sqrt(50.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::fabs(a.z[i] - g[i]) < band);
}

TEST_CASE("sampler y concentrates near the landscape value") {
    // Away from the [0,1] edges truncation bias is negligible, so the mean
    // of many measurements approaches eta itself.
    const auto obj = make_quadratic_well(1, 0.0, 1.0);
    const SyntheticSampler s(obj, 40, 0.1, 0.01, 3);
    const ParamVector theta{0.7};  // eta = 0.49
    double mean = 0.0;
    const int reps = 400;
    for (int k = 0; k < reps; ++k) mean += s.sample(theta, k).y;
    mean /= reps;
    // SE = 0.1 / sqrt(40 * 400) ~ 0.0008
    CHECK(std::fabs(mean - 0.49) < 0.004);
}

TEST_CASE("noise scale probe recovers the gradient noise") {
    const auto obj = make_quadratic_well(2, 0.0, 1.0);
    const int n = 25;
    const double sigma_z = 0.2;
    const SyntheticSampler s(obj, n, 0.05, sigma_z, 11);
    const std::vector<ParamVector> probes{{0.3, 0.1}, {-0.5, 0.8}};
    const double hat = estimate_sigma(s, probes, 300);
    // True per-coordinate std is sigma_z / sqrt(n); the probe reports the
    // full-vector rms, sqrt(dim) times that.
    const double want = sigma_z / std::sqrt(static_cast<double>(n)) * std::sqrt(2.0);
    CHECK(hat == doctest::Approx(want).epsilon(0.2));
}

TEST_SUITE_END();
