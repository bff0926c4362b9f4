#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedgen/rng.hpp"
#include "fedgen/types.hpp"

namespace fedgen {

// Source of objective measurements for one learner. sample() must be a pure
// function of (theta, draw_key, construction-time seed): the optimizer passes
// the round number as draw_key, diagnostics use reserved negative keys, and
// identical inputs must reproduce identical estimates bit for bit.
class ObjectiveSampler {
  public:
    virtual ~ObjectiveSampler() = default;
    virtual std::size_t dimension() const = 0;
    virtual ObjectiveEstimate sample(const ParamVector& theta, std::int64_t draw_key) const = 0;

    // Projection onto the sampler's admissible parameter set, applied by the
    // optimizer after every gradient step. Identity by default; the policy
    // sampler uses it to keep log-sigma at or above its floor.
    virtual void project(ParamVector& /*theta*/) const {}
};

// Piecewise-quadratic test objective with known landscape:
//   eta(theta) = clamp01(base + gain * min_j(||theta - m_j||^2 - d_j))
// One well with d=0 gives a plain quadratic bowl; several wells with distinct
// depths give local minima of different quality, which is what the
// federation-level tests need.
struct SyntheticObjective {
    std::size_t dim = 1;
    std::vector<ParamVector> centers;
    std::vector<double> depths;
    double base = 0.0;
    double gain = 1.0;

    double eta(const ParamVector& theta) const;

    // Gradient of the active quadratic piece; zero wherever the clamp
    // saturates. Not defined on the measure-zero switching ridges, where the
    // active-piece gradient is returned.
    ParamVector grad_eta(const ParamVector& theta) const;

    // Lipschitz constant of grad_eta within one quadratic piece.
    double grad_lipschitz() const { return 2.0 * gain; }

    void validate() const;
};

SyntheticObjective make_quadratic_well(std::size_t dim, double center, double gain);
SyntheticObjective make_double_well(double m1, double d1, double m2, double d2, double base, double gain);

// Measurement model on top of a synthetic objective: y is the mean of
// n_samples per-draw costs eta(theta)+N(0,sigma_y), each redrawn until it
// lands in [0,1] (hard-clamped after 100 tries); z is grad_eta(theta) plus
// the mean of n_samples i.i.d. N(0,sigma_z) vectors.
class SyntheticSampler : public ObjectiveSampler {
  public:
    SyntheticSampler(SyntheticObjective obj, int n_samples, double sigma_y, double sigma_z,
                     std::uint64_t seed);

    std::size_t dimension() const override { return obj_.dim; }
    ObjectiveEstimate sample(const ParamVector& theta, std::int64_t draw_key) const override;

    const SyntheticObjective& objective() const { return obj_; }
    int sample_count() const { return n_samples_; }

  private:
    SyntheticObjective obj_;
    int n_samples_;
    double sigma_y_;
    double sigma_z_;
    RngStream root_;
};

// Gradient-noise scale estimate: at each probe point, draws `repeats`
// estimates and takes sqrt(sum ||z_r - mean||^2 / (repeats-1)); returns the
// max over probes. Uses reserved negative draw keys so it never collides
// with optimization rounds.
double estimate_sigma(const ObjectiveSampler& sampler, std::span<const ParamVector> probes,
                      int repeats);

}  // namespace fedgen
