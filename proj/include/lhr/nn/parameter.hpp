#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lhr/nn/tensor.hpp"

namespace lhr::nn {

using Rng = std::mt19937_64;

struct Parameter {
  Parameter(std::string name, std::vector<std::size_t> shape);

  std::string name;
  Tensor value;
  Tensor gradient;
  Tensor adam_m;
  Tensor adam_v;
  std::uint64_t step_count = 0;

  const std::vector<std::size_t>& shape() const { return value.shape(); }
  std::size_t size() const { return value.size(); }
};

// Owns every trainable parameter of a model under a stable hierarchical name
// (`context_encoder.forward.w`). Addresses stay valid for the set's lifetime.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  Parameter& add(std::string name, std::vector<std::size_t> shape);
  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.cbegin(); }
  auto end() const { return params_.cend(); }

  void zero_gradients();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

void init_uniform(Parameter& p, double limit, Rng& rng);
// Glorot/Xavier uniform over a (fan_out x fan_in) matrix.
void init_glorot(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace lhr::nn
