#pragma once

#include <span>
#include <string>
#include <vector>

#include "lhr/nn/graph.hpp"
#include "lhr/nn/parameter.hpp"

namespace lhr::nn {

enum class Activation { identity, tanh, softmax };

class DenseLayer {
 public:
  DenseLayer() = default;
  // Registers `<prefix>.w` (out x in) and `<prefix>.b` (out); Glorot weights, zero bias.
  DenseLayer(ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t out,
             Activation act, Rng& rng);

  Expr forward(Graph& g, Expr x) const;

  std::size_t input_size() const { return in_; }
  std::size_t output_size() const { return out_; }
  Activation activation() const { return act_; }
  Parameter& weights() const { return *w_; }
  Parameter& bias() const { return *b_; }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
  Activation act_ = Activation::identity;
  std::size_t in_ = 0;
  std::size_t out_ = 0;
};

struct LstmState {
  Expr h;
  Expr c;
};

// Forget-gate LSTM without peepholes. One affine map over [x; h_prev] yields
// the four gate pre-activations stacked as (input, forget, output, candidate):
//   i = sig(a_i), f = sig(a_f), o = sig(a_o), g = tanh(a_g)
//   c = f * c_prev + i * g,  h = o * tanh(c)
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(ParameterSet& params, const std::string& prefix, std::size_t input_size,
           std::size_t hidden_size, Rng& rng);

  LstmState initial_state(Graph& g) const;
  LstmState step(Graph& g, Expr x, LstmState prev) const;

  std::size_t input_size() const { return input_size_; }
  std::size_t hidden_size() const { return hidden_size_; }
  Parameter& weights() const { return *w_; }
  Parameter& bias() const { return *b_; }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
  std::size_t input_size_ = 0;
  std::size_t hidden_size_ = 0;
};

// Two LSTMs, one per reading direction; output i is [forward_i; reverse_i].
class BiEncoder {
 public:
  BiEncoder() = default;
  BiEncoder(ParameterSet& params, const std::string& prefix, std::size_t input_size,
            std::size_t hidden_size, Rng& rng);

  std::vector<Expr> encode(Graph& g, std::span<const Expr> xs) const;

  std::size_t input_size() const { return forward_.input_size(); }
  std::size_t hidden_size() const { return forward_.hidden_size(); }
  std::size_t output_size() const { return 2 * forward_.hidden_size(); }
  const LstmCell& forward_cell() const { return forward_; }
  const LstmCell& reverse_cell() const { return reverse_; }

 private:
  LstmCell forward_;
  LstmCell reverse_;
};

}  // namespace lhr::nn
