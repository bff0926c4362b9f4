// Microbenchmarks for the hot paths: sensing, dynamics integration, full
// rollouts, policy-gradient measurements and a complete synthetic federation
// round. Run with --benchmark_filter=<regex> to pick a subset.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "fedgen/algorithm.hpp"
#include "fedgen/envgen.hpp"
#include "fedgen/nes.hpp"
#include "fedgen/objective.hpp"
#include "fedgen/policy.hpp"
#include "fedgen/rng.hpp"
#include "fedgen/rollout.hpp"

using namespace fedgen;

namespace {

EnvCase make_case(std::uint64_t seed) {
    const EnvironmentSpec spec = sample_environment(seed);
    DisturbanceField field(spec.seed, spec.disturbance);
    RngStream rng = init_state_stream(spec, 0);
    const InitialState s0 = sample_initial_state(spec, rng);
    return EnvCase{spec, field, RobotState{s0.x1, s0.x2, s0.x3}};
}

void bench_sense(benchmark::State& state) {
    const EnvCase c = make_case(42);
    const SensorParams sensor;
    for (auto _ : state) {
        const auto ranges = sense(c.spec, RobotState{0.3, 4.2, 1.1}, sensor);
        benchmark::DoNotOptimize(ranges.data());
    }
    state.SetItemsProcessed(state.iterations() * sensor.beams);
}
BENCHMARK(bench_sense);

void bench_integrate_step(benchmark::State& state) {
    const EnvCase c = make_case(43);
    const CarParams car;
    RobotState s{0.0, 0.5, 1.5707963267948966};
    for (auto _ : state) {
        s = integrate_step(s, 0.1, c.field.at(s.x1, s.x2), 0.05, car);
        if (s.x2 > 9.0) s = RobotState{0.0, 0.5, 1.5707963267948966};
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bench_integrate_step);

void bench_rollout(benchmark::State& state) {
    const EnvCase c = make_case(44);
    MlpSpec mlp;
    mlp.layers = {24, 16, 16, 1};
    RngStream rng(7);
    const ParamVector w = init_policy_weights(mlp, rng);
    MlpScratch scratch;
    const SteeringPolicy policy = [&](std::span<const double> obs) {
        return mlp_forward(mlp, w, obs, scratch);
    };
    const RolloutParams params;
    for (auto _ : state) {
        const RolloutResult r = run_rollout(c.spec, c.field, c.start, policy, params);
        benchmark::DoNotOptimize(r.J);
    }
}
BENCHMARK(bench_rollout);

void bench_mlp_forward(benchmark::State& state) {
    MlpSpec mlp;
    mlp.layers = {24, 20, 20, 20, 1};
    RngStream rng(8);
    const ParamVector w = init_policy_weights(mlp, rng);
    std::vector<double> obs(24, 0.5);
    MlpScratch scratch;
    for (auto _ : state) benchmark::DoNotOptimize(mlp_forward(mlp, w, obs, scratch));
}
BENCHMARK(bench_mlp_forward);

void bench_policy_measurement(benchmark::State& state) {
    MlpSpec mlp;
    mlp.layers = {24, 16, 16, 1};
    NesParams nes;
    nes.pairs = static_cast<int>(state.range(0));
    std::vector<EnvCase> batch = MotionNesSampler::build_cases(11, 0, 10, 1, DisturbanceParams{});
    const MotionNesSampler sampler(mlp, nes, RolloutParams{}, std::move(batch), 5);
    RngStream rng(9);
    ParamVector mu = init_policy_weights(mlp, rng);
    ParamVector sigma(mu.size(), 0.05);
    const ParamVector theta = make_nes_theta(mu, sigma);
    std::int64_t key = 0;
    for (auto _ : state) {
        const ObjectiveEstimate est = sampler.sample(theta, ++key);
        benchmark::DoNotOptimize(est.y);
    }
    state.SetItemsProcessed(state.iterations() * (2 * nes.pairs + 1) * 10);
}
BENCHMARK(bench_policy_measurement)->Arg(2)->Arg(15)->Unit(benchmark::kMillisecond);

void bench_synthetic_round(benchmark::State& state) {
    const SyntheticObjective obj = make_double_well(-1.0, 0.5, 1.0, 0.3, 0.6, 1.0);
    const int V = static_cast<int>(state.range(0));
    std::vector<std::unique_ptr<SyntheticSampler>> samplers;
    std::vector<const ObjectiveSampler*> ptrs;
    std::vector<LearnerConfig> cfgs;
    std::vector<ParamVector> theta0;
    RngStream rng(10);
    for (int i = 0; i < V; ++i) {
        samplers.push_back(std::make_unique<SyntheticSampler>(obj, 738, 0.2, 0.01, rng.next_u64()));
        ptrs.push_back(samplers.back().get());
        cfgs.push_back(make_learner_config(0.25, 0.8, 0.02, 0.05, 738, 1));
        theta0.push_back({rng.uniform(-2.0, 2.0)});
    }
    for (auto _ : state) {
        const RunResult res = run_fedgen(theta0, cfgs, ptrs, 25);
        benchmark::DoNotOptimize(res.ledger.submissions_seen);
    }
    state.SetItemsProcessed(state.iterations() * 25 * V);
    state.SetLabel("25 rounds");
}
BENCHMARK(bench_synthetic_round)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void bench_environment_sampling(benchmark::State& state) {
    std::uint64_t seed = 1000;
    for (auto _ : state) {
        const EnvironmentSpec spec = sample_environment(++seed);
        benchmark::DoNotOptimize(spec.obstacles.size());
    }
}
BENCHMARK(bench_environment_sampling);

void bench_disturbance_field(benchmark::State& state) {
    std::uint64_t seed = 2000;
    for (auto _ : state) {
        const DisturbanceField f(++seed, DisturbanceParams{});
        benchmark::DoNotOptimize(f.at(0.0, 5.0));
    }
    state.SetLabel("full grid synthesis");
}
BENCHMARK(bench_disturbance_field)->Unit(benchmark::kMillisecond);

}  // namespace
