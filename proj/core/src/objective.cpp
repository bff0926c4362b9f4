#include "fedgen/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedgen {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void SyntheticObjective::validate() const {
    if (dim == 0) throw std::invalid_argument("synthetic objective: dim must be positive");
    if (centers.empty()) throw std::invalid_argument("synthetic objective: needs at least one well");
    if (centers.size() != depths.size())
        throw std::invalid_argument("synthetic objective: centers/depths size mismatch");
    for (const auto& c : centers) {
        if (c.size() != dim) throw std::invalid_argument("synthetic objective: center dimension mismatch");
    }
    if (!(gain > 0.0)) throw std::invalid_argument("synthetic objective: gain must be positive");
}

double SyntheticObjective::eta(const ParamVector& theta) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = theta[i] - centers[j][i];
            sq += d * d;
        }
        best = std::min(best, sq - depths[j]);
    }
    return clamp01(base + gain * best);
}

ParamVector SyntheticObjective::grad_eta(const ParamVector& theta) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t active = 0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = theta[i] - centers[j][i];
            sq += d * d;
        }
        if (sq - depths[j] < best) {
            best = sq - depths[j];
            active = j;
        }
    }
    const double raw = base + gain * best;
    ParamVector g(dim, 0.0);
    if (raw <= 0.0 || raw >= 1.0) return g;  // clamp plateau
    for (std::size_t i = 0; i < dim; ++i) g[i] = 2.0 * gain * (theta[i] - centers[active][i]);
    return g;
}

SyntheticObjective make_quadratic_well(std::size_t dim, double center, double gain) {
    SyntheticObjective o;
    o.dim = dim;
    o.centers = {ParamVector(dim, center)};
    o.depths = {0.0};
    o.base = 0.0;
    o.gain = gain;
    o.validate();
    return o;
}

SyntheticObjective make_double_well(double m1, double d1, double m2, double d2, double base,
                                    double gain) {
    SyntheticObjective o;
    o.dim = 1;
    o.centers = {ParamVector{m1}, ParamVector{m2}};
    o.depths = {d1, d2};
    o.base = base;
    o.gain = gain;
    o.validate();
    return o;
}

SyntheticSampler::SyntheticSampler(SyntheticObjective obj, int n_samples, double sigma_y,
                                   double sigma_z, std::uint64_t seed)
    : obj_(std::move(obj)), n_samples_(n_samples), sigma_y_(sigma_y), sigma_z_(sigma_z), root_(seed) {
    obj_.validate();
    if (n_samples_ <= 0) throw std::invalid_argument("synthetic sampler: n_samples must be positive");
    if (sigma_y_ < 0.0 || sigma_z_ < 0.0)
        throw std::invalid_argument("synthetic sampler: noise scales must be non-negative");
}

ObjectiveEstimate SyntheticSampler::sample(const ParamVector& theta, std::int64_t draw_key) const {
    if (theta.size() != obj_.dim)
        throw std::invalid_argument("synthetic sampler: theta dimension mismatch");
    if (!all_finite(theta))
        throw std::invalid_argument("synthetic sampler: theta contains a non-finite entry");

    RngStream rng = root_.derive(static_cast<std::uint64_t>(draw_key));
    const double value = obj_.eta(theta);
    const ParamVector grad = obj_.grad_eta(theta);

    double y_sum = 0.0;
    ParamVector noise_sum(obj_.dim, 0.0);
    for (int s = 0; s < n_samples_; ++s) {
        double draw = value;
        if (sigma_y_ > 0.0) {
            draw = value + sigma_y_ * rng.normal();
            for (int tries = 0; (draw < 0.0 || draw > 1.0) && tries < 100; ++tries)
                draw = value + sigma_y_ * rng.normal();
            draw = clamp01(draw);
        }
        y_sum += draw;
        for (std::size_t i = 0; i < obj_.dim; ++i) noise_sum[i] += sigma_z_ * rng.normal();
    }

    ObjectiveEstimate est;
    est.y = clamp01(y_sum / n_samples_);  // clamp guards FP roundoff of the mean
    est.z = grad;
    for (std::size_t i = 0; i < obj_.dim; ++i) est.z[i] += noise_sum[i] / n_samples_;
    return est;
}

double estimate_sigma(const ObjectiveSampler& sampler, std::span<const ParamVector> probes,
                      int repeats) {
    if (probes.empty()) throw std::invalid_argument("estimate_sigma: needs at least one probe point");
    if (repeats < 2) throw std::invalid_argument("estimate_sigma: needs at least two repeats");

    double worst = 0.0;
    std::int64_t key = -1000000000;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        std::vector<ParamVector> zs;
        zs.reserve(static_cast<std::size_t>(repeats));
        for (int r = 0; r < repeats; ++r) zs.push_back(sampler.sample(probes[p], key--).z);

        const std::size_t dim = sampler.dimension();
        ParamVector mean(dim, 0.0);
        for (const auto& z : zs)
            for (std::size_t i = 0; i < dim; ++i) mean[i] += z[i];
        for (std::size_t i = 0; i < dim; ++i) mean[i] /= repeats;

        double ss = 0.0;
        for (const auto& z : zs) {
            for (std::size_t i = 0; i < dim; ++i) {
                const double d = z[i] - mean[i];
                ss += d * d;
            }
        }
        worst = std::max(worst, std::sqrt(ss / (repeats - 1)));
    }
    return worst;
}

}  // namespace fedgen
