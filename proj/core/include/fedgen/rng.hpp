#pragma once

#include <cmath>
#include <cstdint>

namespace fedgen {

// Counter-style deterministic RNG. A stream is a 64-bit state advanced by the
// splitmix64 sequence; derive(a,b,c) produces an independent substream keyed
// by up to three integers. Keying streams by (learner, round, sample index)
// makes every draw independent of scheduling order, which is what round-level
// reproducibility rests on. Normals use Box-Muller rather than
// std::normal_distribution so the byte stream does not depend on the standard
// library implementation.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ 0x8f1bbcdcbfa53e0bULL)) {}

    RngStream derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        std::uint64_t h = state_;
        h = mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
        h = mix(h ^ (b + 0xbf58476d1ce4e5b9ULL));
        h = mix(h ^ (c + 0x94d049bb133111ebULL));
        return RngStream(h, 0);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Inclusive integer range. Modulo bias is negligible for the small ranges
    // used here (span << 2^64).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    double normal() {
        double u1 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    RngStream(std::uint64_t raw, int) : state_(raw) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace fedgen
