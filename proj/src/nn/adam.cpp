#include "lhr/nn/adam.hpp"

#include <cmath>

#include "lhr/error.hpp"
#include "lhr/simd/kernels.hpp"

namespace lhr::nn {

void adam_step(ParameterSet& params, const AdamConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) || !(cfg.epsilon > 0.0)) {
    throw ConfigError("adam: invalid hyperparameters");
  }
  for (const auto& p : params) {
    if (!p->gradient.all_finite()) throw NumericError("non-finite gradient in parameter " + p->name);
  }
  const auto& kern = simd::kernels();
  for (auto& p : params) {
    ++p->step_count;
    const double t = static_cast<double>(p->step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = std::sqrt(1.0 - std::pow(cfg.beta2, t));
    kern.adam(p->value.data().data(), p->gradient.data().data(), p->adam_m.data().data(),
              p->adam_v.data().data(), p->size(), cfg.beta1, cfg.beta2,
              cfg.learning_rate * bc2 / bc1, cfg.epsilon * bc2);
  }
}

}  // namespace lhr::nn
