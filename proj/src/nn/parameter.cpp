#include "lhr/nn/parameter.hpp"

#include <cmath>

#include "lhr/error.hpp"

namespace lhr::nn {

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw InvalidInput("Tensor: shape does not match data length");
  }
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Parameter::Parameter(std::string n, std::vector<std::size_t> shape)
    : name(std::move(n)), value(shape), gradient(shape), adam_m(shape), adam_v(std::move(shape)) {}

Parameter& ParameterSet::add(std::string name, std::vector<std::size_t> shape) {
  if (find(name) != nullptr) throw ConfigError("duplicate parameter name: " + name);
  for (std::size_t d : shape) {
    if (d == 0) throw ConfigError("parameter " + name + " has a zero dimension");
  }
  params_.push_back(std::make_unique<Parameter>(std::move(name), std::move(shape)));
  return *params_.back();
}

Parameter* ParameterSet::find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Parameter* ParameterSet::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void ParameterSet::zero_gradients() {
  for (auto& p : params_) p->gradient.fill(0.0);
}

void init_uniform(Parameter& p, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : p.value.data()) v = dist(rng);
}

void init_glorot(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  init_uniform(p, std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)), rng);
}

}  // namespace lhr::nn
