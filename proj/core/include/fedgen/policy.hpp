#pragma once

#include <span>
#include <vector>

#include "fedgen/rng.hpp"
#include "fedgen/types.hpp"

namespace fedgen {

// Fully connected net: ReLU hidden layers, single output squashed by
// tanh() * out_scale so the steering command always respects the actuator
// limit. Weights are stored flat, layer by layer: the (out x in) matrix
// row-major, then the out biases.
struct MlpSpec {
    std::vector<int> layers{24, 20, 20, 20, 1};
    double out_scale = 0.7853981633974483;  // pi/4

    void validate() const;
};

std::size_t param_count(const MlpSpec& spec);

struct MlpScratch {
    std::vector<double> a, b;
};

double mlp_forward(const MlpSpec& spec, std::span<const double> weights,
                   std::span<const double> input, MlpScratch& scratch);

// Entries uniform on [-0.5, 0.5] scaled by 1/sqrt(fan_in) of their layer.
ParamVector init_policy_weights(const MlpSpec& spec, RngStream& rng);

}  // namespace fedgen
