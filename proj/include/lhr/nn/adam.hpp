#pragma once

#include "lhr/nn/parameter.hpp"

namespace lhr::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update on every parameter, then zeroes gradients.
// Throws NumericError, leaving all values untouched, if any gradient is
// non-finite.
void adam_step(ParameterSet& params, const AdamConfig& cfg);

}  // namespace lhr::nn
