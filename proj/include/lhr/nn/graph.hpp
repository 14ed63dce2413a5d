#pragma once

// Reverse-mode tape over vector-valued nodes. A Graph lives for one forward
// pass (one sentence): build expressions, then call backward() once on a
// scalar loss to accumulate gradients into the Parameters that took part.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "lhr/nn/parameter.hpp"

namespace lhr::nn {

struct Expr {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Constant input; no gradient flows out of it.
  Expr input(std::span<const double> values);
  Expr input(std::initializer_list<double> values);
  // The whole parameter as a flat vector.
  Expr parameter(Parameter& p);
  // Row `row` of a (V x d) table.
  Expr lookup(Parameter& table, std::size_t row);
  // W x + b with W (out x in), b (out).
  Expr affine(Parameter& w, Parameter& b, Expr x);

  Expr add(Expr a, Expr b);
  Expr mul(Expr a, Expr b);
  Expr scale(Expr a, double k);
  Expr tanh(Expr a);
  Expr sigmoid(Expr a);
  Expr softmax(Expr a);
  Expr concat(std::span<const Expr> parts);
  Expr concat(std::initializer_list<Expr> parts);
  Expr slice(Expr a, std::size_t offset, std::size_t length);
  // Same value, gradient stops here.
  Expr detach(Expr a);

  // Scalar losses.
  Expr mse(Expr pred, Expr target);
  Expr mae(Expr pred, Expr target);
  Expr margin(Expr scores, std::size_t gold);
  Expr softmax_cross_entropy(Expr scores, std::size_t gold);
  Expr sum(std::span<const Expr> scalars);

  std::span<const double> value(Expr e) const;
  double scalar(Expr e) const;
  std::size_t dim(Expr e) const { return value(e).size(); }
  // Valid after backward().
  std::span<const double> gradient(Expr e) const;

  void backward(Expr loss);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    input, parameter, lookup, affine, add, mul, scale, tanh, sigmoid, softmax,
    concat, slice, detach, mse, mae, margin, xent, sum
  };

  struct Node {
    Op op;
    std::vector<std::uint32_t> args;
    std::vector<double> value;
    std::vector<double> grad;
    Parameter* param = nullptr;
    Parameter* param2 = nullptr;
    std::size_t index = 0;
    double k = 0.0;
  };

  Expr push(Node node);
  const Node& at(Expr e) const;
  std::vector<double>& grad_of(std::uint32_t id);
  void propagate(std::uint32_t id);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace lhr::nn
