#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "fedgen/envgen.hpp"
#include "fedgen/io.hpp"

using namespace fedgen;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("envgen");

TEST_CASE("environment sampling is deterministic and in range") {
    for (std::uint64_t seed : {1ULL, 42ULL, 977ULL}) {
        const auto a = sample_environment(seed);
        const auto b = sample_environment(seed);
        REQUIRE(a.obstacles.size() == b.obstacles.size());
        for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
            CHECK(a.obstacles[i].cx == b.obstacles[i].cx);
            CHECK(a.obstacles[i].cy == b.obstacles[i].cy);
            CHECK(a.obstacles[i].r == b.obstacles[i].r);
        }

        CHECK(a.obstacles.size() >= 15);
        CHECK(a.obstacles.size() <= 30);
        for (const auto& o : a.obstacles) {
            CHECK(o.cx >= -5.0);
            CHECK(o.cx <= 5.0);
            CHECK(o.cy >= 2.0);
            CHECK(o.cy <= 9.7);  // goal edge kept clear
            CHECK(o.r >= 0.1);
            CHECK(o.r <= 0.25);
        }
    }
}

TEST_CASE("obstacle counts cover the {15..30} range across seeds") {
    std::set<std::size_t> counts;
    for (std::uint64_t s = 0; s < 400; ++s) counts.insert(sample_environment(s).obstacles.size());
    CHECK(counts.size() > 10);
    CHECK(*counts.begin() >= 15);
    CHECK(*counts.rbegin() <= 30);
}

TEST_CASE("environment text record round-trips bitwise") {
    const auto env = sample_environment(1234);
    const std::string text = serialize_environment(env);
    const auto back = parse_environment(text);
    CHECK(serialize_environment(back) == text);
    CHECK(back.seed == env.seed);
    REQUIRE(back.obstacles.size() == env.obstacles.size());
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        CHECK(back.obstacles[i].cx == env.obstacles[i].cx);
        CHECK(back.obstacles[i].r == env.obstacles[i].r);
    }
    CHECK(back.disturbance.sigma_d == env.disturbance.sigma_d);
    CHECK(back.disturbance.modes == env.disturbance.modes);

    CHECK_THROWS(parse_environment("not-an-env v1\n"));
}

TEST_CASE("corpus directory write and ordered load") {
    const fs::path dir = fs::temp_directory_path() / "fedgen_test_corpus";
    fs::remove_all(dir);
    write_corpus(dir, 5, 77);
    const auto envs = load_corpus(dir);
    REQUIRE(envs.size() == 5);

    // Same master seed regenerates the identical corpus, element by element.
    const fs::path dir2 = fs::temp_directory_path() / "fedgen_test_corpus2";
    fs::remove_all(dir2);
    write_corpus(dir2, 5, 77);
    const auto envs2 = load_corpus(dir2);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(serialize_environment(envs[i]) == serialize_environment(envs2[i]));

    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("train and eval seed blocks do not collide") {
    std::set<std::uint64_t> seen;
    for (int learner = 0; learner < 8; ++learner)
        for (int idx = 0; idx < 50; ++idx) seen.insert(train_env_seed(9, learner, idx));
    for (int idx = 0; idx < 400; ++idx) seen.insert(eval_env_seed(9, idx));
    CHECK(seen.size() == 8 * 50 + 400);
}

TEST_CASE("disturbance field basics") {
    DisturbanceParams p;
    const DisturbanceField f(5, p), g(5, p);
    CHECK(f.at(1.3, 4.2) == g.at(1.3, 4.2));  // deterministic

    // Bounded by the cap everywhere, including outside the arena (clamped).
    double max_abs = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.37)
        for (double y = -1.0; y <= 11.0; y += 0.41)
            max_abs = std::max(max_abs, std::fabs(f.at(x, y)));
    CHECK(max_abs <= p.d_max);
    CHECK(max_abs > 0.0);

    DisturbanceParams quiet = p;
    quiet.sigma_d = 0.0;
    const DisturbanceField z(5, quiet);
    CHECK(z.at(0.0, 5.0) == 0.0);
    CHECK(z.at(3.3, 7.7) == 0.0);
}

TEST_CASE("disturbance interpolation is continuous") {
    DisturbanceParams p;
    const DisturbanceField f(11, p);
    const double v = f.at(0.7301, 4.1177);
    CHECK(std::fabs(f.at(0.7301 + 1e-9, 4.1177) - v) < 1e-6);
    CHECK(std::fabs(f.at(0.7301, 4.1177 + 1e-9) - v) < 1e-6);
}

TEST_CASE("disturbance decorrelates beyond the correlation length") {
    DisturbanceParams p;
    p.corr_length = 0.5;
    // Empirical autocorrelation over ~11.5k node pairs at each lag.
    const double lags[4] = {0.05, 0.1, p.corr_length, 4.0};
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    double var_acc = 0.0;
    int count = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        const DisturbanceField f(1000 + s, p);
        for (double x = -4.0; x <= 4.0; x += 0.5) {
            for (double y = 1.0; y <= 9.0; y += 0.5) {
                const double v = f.at(x, y);
                for (int i = 0; i < 4; ++i) acc[i] += v * f.at(x + lags[i], y);
                var_acc += v * v;
                ++count;
            }
        }
    }
    // Coherent at sub-grid lags, decaying monotonically, and below half the
    // lag-0 value by one correlation length. The heavy spectral tail keeps
    // plenty of energy near the grid Nyquist, so mid-lag correlations are
    // modest rather than Gaussian-kernel high.
    const double c_005 = acc[0] / var_acc;
    const double c_01 = acc[1] / var_acc;
    const double c_lc = acc[2] / var_acc;
    const double c_far = acc[3] / var_acc;
    CHECK(c_005 > 0.6);
    CHECK(c_01 > 0.4);
    CHECK(c_005 > c_01);
    CHECK(c_01 > c_lc);
    CHECK(c_lc < 0.5);
    CHECK(std::fabs(c_far) < 0.2);
    // Field variance lands near sigma_d^2 (cap rarely binds at these values).
    CHECK(var_acc / count == doctest::Approx(p.sigma_d * p.sigma_d).epsilon(0.3));
}

TEST_CASE("initial states clear obstacles and are reproducible") {
    const auto env = sample_environment(321);
    for (int idx = 0; idx < 10; ++idx) {
        auto s1 = init_state_stream(env, idx);
        auto s2 = init_state_stream(env, idx);
        const auto a = sample_initial_state(env, s1);
        const auto b = sample_initial_state(env, s2);
        CHECK(a.x1 == b.x1);
        CHECK(a.x1 >= -4.0);
        CHECK(a.x1 <= 4.0);
        CHECK(a.x2 == 0.5);
        CHECK(a.x3 == doctest::Approx(1.5707963267948966));
        for (const auto& o : env.obstacles) {
            const double d = std::hypot(a.x1 - o.cx, a.x2 - o.cy);
            CHECK(d >= o.r + 0.3);
        }
    }
}

TEST_SUITE_END();
