#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fedgen/rng.hpp"

namespace fedgen {

// Workspace: a rectangle with solid left/right/bottom walls and an open top
// edge that serves as the goal segment.
namespace arena {
inline constexpr double x1_min = -5.0;
inline constexpr double x1_max = 5.0;
inline constexpr double x2_min = 0.0;
inline constexpr double x2_max = 10.0;
}  // namespace arena

struct Obstacle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

struct DisturbanceParams {
    double sigma_d = 0.25;     // field standard deviation
    double corr_length = 2.0;  // spectrum knee scale
    double grid_res = 0.1;     // sample grid spacing
    double d_max = 1.0;        // hard cap on |d|
    int modes = 128;           // cosines in the spectral sum
};

struct EnvironmentSpec {
    std::uint64_t seed = 0;
    std::vector<Obstacle> obstacles;
    DisturbanceParams disturbance;
};

// Draws one environment: obstacle count uniform on {15..30}, centers uniform
// over the arena with x2 in [2, 10] but rejected above 9.7 so the goal edge
// stays clear, radii uniform on [0.1, 0.25]. Fully determined by the seed.
EnvironmentSpec sample_environment(std::uint64_t seed, const DisturbanceParams& params = {});

// Stationary random wind-like field acting on the x1 velocity. Synthesized as
// a sum of random cosines whose wavenumber magnitudes follow the spectrum
//   Phi(k) ~ sigma_d^2 * L / (1 + (L k)^2)^(5/6),   L = corr_length,
// truncated at the grid Nyquist limit. Values are precomputed on the grid,
// capped at +-d_max, and bilinearly interpolated; queries outside the arena
// clamp to the boundary. Construction is deterministic in (seed, params).
class DisturbanceField {
  public:
    DisturbanceField(std::uint64_t seed, const DisturbanceParams& params);

    double at(double x1, double x2) const;

    const DisturbanceParams& params() const { return params_; }

  private:
    DisturbanceParams params_;
    int nx_ = 0, ny_ = 0;
    std::vector<double> grid_;  // row-major, x2 rows of x1 values
};

struct InitialState {
    double x1 = 0.0;
    double x2 = 0.5;
    double x3 = 1.5707963267948966;  // facing the goal edge
};

// x1 uniform on [-4, 4], redrawn until the start point clears every obstacle
// boundary by at least 0.3. Throws after 1000 rejections (only reachable with
// hand-built specs; sampled environments keep obstacles well above x2=0.5).
InitialState sample_initial_state(const EnvironmentSpec& env, RngStream& rng);

// Stream for the index-th initial-state draw of an environment, so the same
// (environment, index) pair always yields the same start state.
RngStream init_state_stream(const EnvironmentSpec& env, int index);

// Versioned line-oriented text record; round-trips losslessly.
std::string serialize_environment(const EnvironmentSpec& env);
EnvironmentSpec parse_environment(std::string_view text);

void save_environment(const EnvironmentSpec& env, const std::filesystem::path& file);
EnvironmentSpec load_environment(const std::filesystem::path& file);

// Corpus directory: env_00000.txt .. env_{count-1}.txt, seeds derived from
// corpus_seed. load_corpus reads every env_*.txt in name order.
void write_corpus(const std::filesystem::path& dir, int count, std::uint64_t corpus_seed,
                  const DisturbanceParams& params = {});
std::vector<EnvironmentSpec> load_corpus(const std::filesystem::path& dir);

// Seed blocks for corpus generation. Training and evaluation pull from
// disjoint tagged streams of one master seed.
std::uint64_t train_env_seed(std::uint64_t master_seed, int learner, int index);
std::uint64_t eval_env_seed(std::uint64_t master_seed, int index);

}  // namespace fedgen
