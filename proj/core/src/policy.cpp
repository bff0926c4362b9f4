#include "fedgen/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace fedgen {

void MlpSpec::validate() const {
    if (layers.size() < 2) throw std::invalid_argument("mlp: needs at least input and output layers");
    for (int n : layers)
        if (n <= 0) throw std::invalid_argument("mlp: layer sizes must be positive");
    if (layers.back() != 1) throw std::invalid_argument("mlp: steering head must have one output");
    if (!(out_scale > 0.0)) throw std::invalid_argument("mlp: out_scale must be positive");
}

std::size_t param_count(const MlpSpec& spec) {
    spec.validate();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l)
        n += static_cast<std::size_t>(spec.layers[l] + 1) * static_cast<std::size_t>(spec.layers[l + 1]);
    return n;
}

double mlp_forward(const MlpSpec& spec, std::span<const double> weights,
                   std::span<const double> input, MlpScratch& scratch) {
    if (weights.size() != param_count(spec))
        throw std::invalid_argument("mlp_forward: weight vector has wrong length");
    if (input.size() != static_cast<std::size_t>(spec.layers.front()))
        throw std::invalid_argument("mlp_forward: input has wrong length");

    scratch.a.assign(input.begin(), input.end());
    const double* w = weights.data();
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
        const int in = spec.layers[l];
        const int out = spec.layers[l + 1];
        scratch.b.assign(static_cast<std::size_t>(out), 0.0);
        for (int o = 0; o < out; ++o) {
            double acc = 0.0;
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * scratch.a[static_cast<std::size_t>(i)];
            scratch.b[static_cast<std::size_t>(o)] = acc;
        }
        w += static_cast<std::size_t>(out) * in;
        for (int o = 0; o < out; ++o) scratch.b[static_cast<std::size_t>(o)] += w[o];
        w += out;

        const bool last = l + 2 == spec.layers.size();
        if (!last) {
            for (auto& v : scratch.b)
                if (v < 0.0) v = 0.0;
        }
        scratch.a.swap(scratch.b);
    }
    return spec.out_scale * std::tanh(scratch.a[0]);
}

ParamVector init_policy_weights(const MlpSpec& spec, RngStream& rng) {
    spec.validate();
    ParamVector w;
    w.reserve(param_count(spec));
    for (std::size_t l = 0; l + 1 < spec.layers.size(); ++l) {
        const int in = spec.layers[l];
        const int out = spec.layers[l + 1];
        const double scale = 1.0 / std::sqrt(static_cast<double>(in));
        for (int i = 0; i < out * in + out; ++i) w.push_back(rng.uniform(-0.5, 0.5) * scale);
    }
    return w;
}

}  // namespace fedgen
