#include "lhr/nn/layers.hpp"

#include "lhr/error.hpp"

namespace lhr::nn {

DenseLayer::DenseLayer(ParameterSet& params, const std::string& prefix, std::size_t in,
                       std::size_t out, Activation act, Rng& rng)
    : w_(&params.add(prefix + ".w", {out, in})),
      b_(&params.add(prefix + ".b", {out})),
      act_(act),
      in_(in),
      out_(out) {
  init_glorot(*w_, in, out, rng);
}

Expr DenseLayer::forward(Graph& g, Expr x) const {
  if (g.dim(x) != in_) {
    throw ConfigError("dense layer " + w_->name + ": expected input of size " + std::to_string(in_) +
                      ", got " + std::to_string(g.dim(x)));
  }
  const Expr z = g.affine(*w_, *b_, x);
  switch (act_) {
    case Activation::tanh: return g.tanh(z);
    case Activation::softmax: return g.softmax(z);
    case Activation::identity: break;
  }
  return z;
}

LstmCell::LstmCell(ParameterSet& params, const std::string& prefix, std::size_t input_size,
                   std::size_t hidden_size, Rng& rng)
    : w_(&params.add(prefix + ".w", {4 * hidden_size, input_size + hidden_size})),
      b_(&params.add(prefix + ".b", {4 * hidden_size})),
      input_size_(input_size),
      hidden_size_(hidden_size) {
  init_glorot(*w_, input_size + hidden_size, hidden_size, rng);
  // forget gate starts open
  for (std::size_t k = hidden_size; k < 2 * hidden_size; ++k) b_->value[k] = 1.0;
}

LstmState LstmCell::initial_state(Graph& g) const {
  const std::vector<double> zeros(hidden_size_, 0.0);
  return {g.input(zeros), g.input(zeros)};
}

LstmState LstmCell::step(Graph& g, Expr x, LstmState prev) const {
  if (g.dim(x) != input_size_) {
    throw ConfigError("LSTM " + w_->name + ": expected input of size " + std::to_string(input_size_) +
                      ", got " + std::to_string(g.dim(x)));
  }
  if (g.dim(prev.h) != hidden_size_ || g.dim(prev.c) != hidden_size_) {
    throw ConfigError("LSTM " + w_->name + ": state size mismatch");
  }
  const std::size_t hs = hidden_size_;
  const Expr z = g.affine(*w_, *b_, g.concat({x, prev.h}));
  const Expr in_gate = g.sigmoid(g.slice(z, 0, hs));
  const Expr forget_gate = g.sigmoid(g.slice(z, hs, hs));
  const Expr out_gate = g.sigmoid(g.slice(z, 2 * hs, hs));
  const Expr candidate = g.tanh(g.slice(z, 3 * hs, hs));
  const Expr c = g.add(g.mul(forget_gate, prev.c), g.mul(in_gate, candidate));
  const Expr h = g.mul(out_gate, g.tanh(c));
  return {h, c};
}

BiEncoder::BiEncoder(ParameterSet& params, const std::string& prefix, std::size_t input_size,
                     std::size_t hidden_size, Rng& rng)
    : forward_(params, prefix + ".forward", input_size, hidden_size, rng),
      reverse_(params, prefix + ".reverse", input_size, hidden_size, rng) {}

std::vector<Expr> BiEncoder::encode(Graph& g, std::span<const Expr> xs) const {
  if (xs.empty()) throw InvalidInput("bi_encode: empty input sequence");
  const std::size_t n = xs.size();
  std::vector<Expr> fwd(n), rev(n);
  LstmState s = forward_.initial_state(g);
  for (std::size_t i = 0; i < n; ++i) {
    s = forward_.step(g, xs[i], s);
    fwd[i] = s.h;
  }
  s = reverse_.initial_state(g);
  for (std::size_t i = n; i-- > 0;) {
    s = reverse_.step(g, xs[i], s);
    rev[i] = s.h;
  }
  std::vector<Expr> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = g.concat({fwd[i], rev[i]});
  return out;
}

}  // namespace lhr::nn
