#include "lhr/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lhr/error.hpp"
#include "lhr/simd/kernels.hpp"

namespace lhr::nn {
namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ConfigError(std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Expr Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Expr{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::at(Expr e) const {
  if (!e.valid() || e.id >= nodes_.size()) throw UsageError("expression does not belong to this graph");
  return nodes_[e.id];
}

Expr Graph::input(std::span<const double> values) {
  Node n{Op::input, {}, std::vector<double>(values.begin(), values.end()), {}};
  return push(std::move(n));
}

Expr Graph::input(std::initializer_list<double> values) {
  return input(std::span<const double>(values.begin(), values.size()));
}

Expr Graph::parameter(Parameter& p) {
  auto v = p.value.data();
  Node n{Op::parameter, {}, std::vector<double>(v.begin(), v.end()), {}};
  n.param = &p;
  return push(std::move(n));
}

Expr Graph::lookup(Parameter& table, std::size_t row) {
  if (table.shape().size() != 2 || row >= table.value.rows()) {
    throw InvalidInput("lookup: row " + std::to_string(row) + " out of range for " + table.name);
  }
  auto r = table.value.row(row);
  Node n{Op::lookup, {}, std::vector<double>(r.begin(), r.end()), {}};
  n.param = &table;
  n.index = row;
  return push(std::move(n));
}

Expr Graph::affine(Parameter& w, Parameter& b, Expr x) {
  const std::size_t rows = w.value.rows();
  const std::size_t cols = w.value.cols();
  if (w.shape().size() != 2) throw ConfigError("affine: " + w.name + " is not a matrix");
  require_same_dim(cols, dim(x), "affine input");
  require_same_dim(rows, b.size(), "affine bias");
  std::vector<double> y(b.value.data().begin(), b.value.data().end());
  simd::kernels().gemv(w.value.data().data(), rows, cols, value(x).data(), y.data());
  Node n{Op::affine, {x.id}, std::move(y), {}};
  n.param = &w;
  n.param2 = &b;
  return push(std::move(n));
}

Expr Graph::add(Expr a, Expr b) {
  auto va = value(a);
  auto vb = value(b);
  require_same_dim(va.size(), vb.size(), "add");
  std::vector<double> y(va.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = va[i] + vb[i];
  return push(Node{Op::add, {a.id, b.id}, std::move(y), {}});
}

Expr Graph::mul(Expr a, Expr b) {
  auto va = value(a);
  auto vb = value(b);
  require_same_dim(va.size(), vb.size(), "mul");
  std::vector<double> y(va.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = va[i] * vb[i];
  return push(Node{Op::mul, {a.id, b.id}, std::move(y), {}});
}

Expr Graph::scale(Expr a, double k) {
  auto va = value(a);
  std::vector<double> y(va.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = k * va[i];
  Node n{Op::scale, {a.id}, std::move(y), {}};
  n.k = k;
  return push(std::move(n));
}

Expr Graph::tanh(Expr a) {
  auto va = value(a);
  std::vector<double> y(va.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(va[i]);
  return push(Node{Op::tanh, {a.id}, std::move(y), {}});
}

Expr Graph::sigmoid(Expr a) {
  auto va = value(a);
  std::vector<double> y(va.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = stable_sigmoid(va[i]);
  return push(Node{Op::sigmoid, {a.id}, std::move(y), {}});
}

Expr Graph::softmax(Expr a) {
  auto va = value(a);
  if (va.empty()) throw InvalidInput("softmax of an empty vector");
  const double mx = *std::max_element(va.begin(), va.end());
  std::vector<double> y(va.size());
  double z = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) z += (y[i] = std::exp(va[i] - mx));
  for (double& v : y) v /= z;
  return push(Node{Op::softmax, {a.id}, std::move(y), {}});
}

Expr Graph::concat(std::span<const Expr> parts) {
  Node n{Op::concat, {}, {}, {}};
  for (Expr p : parts) {
    auto v = value(p);
    n.value.insert(n.value.end(), v.begin(), v.end());
    n.args.push_back(p.id);
  }
  return push(std::move(n));
}

Expr Graph::concat(std::initializer_list<Expr> parts) {
  return concat(std::span<const Expr>(parts.begin(), parts.size()));
}

Expr Graph::slice(Expr a, std::size_t offset, std::size_t length) {
  auto va = value(a);
  if (offset + length > va.size()) throw InvalidInput("slice out of range");
  Node n{Op::slice, {a.id}, std::vector<double>(va.begin() + offset, va.begin() + offset + length), {}};
  n.index = offset;
  return push(std::move(n));
}

Expr Graph::detach(Expr a) {
  auto va = value(a);
  return push(Node{Op::detach, {a.id}, std::vector<double>(va.begin(), va.end()), {}});
}

Expr Graph::mse(Expr pred, Expr target) {
  auto p = value(pred);
  auto t = value(target);
  if (p.size() != t.size()) throw InvalidInput("mse: length mismatch");
  if (p.empty()) throw InvalidInput("mse: empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
  return push(Node{Op::mse, {pred.id, target.id}, {s / static_cast<double>(p.size())}, {}});
}

Expr Graph::mae(Expr pred, Expr target) {
  auto p = value(pred);
  auto t = value(target);
  if (p.size() != t.size()) throw InvalidInput("mae: length mismatch");
  if (p.empty()) throw InvalidInput("mae: empty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - t[i]);
  return push(Node{Op::mae, {pred.id, target.id}, {s / static_cast<double>(p.size())}, {}});
}

Expr Graph::margin(Expr scores, std::size_t gold) {
  auto s = value(scores);
  if (gold >= s.size()) throw InvalidInput("margin: gold index out of range");
  std::size_t best = s.size();
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k != gold && (best == s.size() || s[k] > s[best])) best = k;
  }
  const double loss = best == s.size() ? 0.0 : std::max(0.0, 1.0 - s[gold] + s[best]);
  Node n{Op::margin, {scores.id}, {loss}, {}};
  n.index = gold;
  n.k = static_cast<double>(best);
  return push(std::move(n));
}

Expr Graph::softmax_cross_entropy(Expr scores, std::size_t gold) {
  auto s = value(scores);
  if (gold >= s.size()) throw InvalidInput("cross-entropy: gold index out of range");
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double v : s) z += std::exp(v - mx);
  Node n{Op::xent, {scores.id}, {std::log(z) + mx - s[gold]}, {}};
  n.index = gold;
  return push(std::move(n));
}

Expr Graph::sum(std::span<const Expr> scalars) {
  Node n{Op::sum, {}, {0.0}, {}};
  for (Expr e : scalars) {
    auto v = value(e);
    if (v.size() != 1) throw InvalidInput("sum: operands must be scalars");
    n.value[0] += v[0];
    n.args.push_back(e.id);
  }
  return push(std::move(n));
}

std::span<const double> Graph::value(Expr e) const { return at(e).value; }

double Graph::scalar(Expr e) const {
  auto v = value(e);
  if (v.size() != 1) throw InvalidInput("expression is not a scalar");
  return v[0];
}

std::span<const double> Graph::gradient(Expr e) const {
  const Node& n = at(e);
  if (!backward_done_) throw UsageError("gradient requested before backward");
  return n.grad;
}

std::vector<double>& Graph::grad_of(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

void Graph::backward(Expr loss) {
  if (nodes_.empty()) throw UsageError("backward called without a forward pass");
  if (backward_done_) throw UsageError("backward already ran on this graph");
  if (at(loss).value.size() != 1) throw InvalidInput("backward: loss must be a scalar");
  backward_done_ = true;
  grad_of(loss.id)[0] = 1.0;
  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    if (!nodes_[id].grad.empty()) propagate(id);
  }
}

void Graph::propagate(std::uint32_t id) {
  const auto& kern = simd::kernels();
  Node& n = nodes_[id];
  const std::vector<double>& gy = n.grad;
  switch (n.op) {
    case Op::input:
    case Op::detach:
      break;
    case Op::parameter: {
      auto g = n.param->gradient.data();
      kern.axpy(1.0, gy.data(), g.data(), g.size());
      break;
    }
    case Op::lookup: {
      auto g = n.param->gradient.row(n.index);
      kern.axpy(1.0, gy.data(), g.data(), g.size());
      break;
    }
    case Op::affine: {
      Parameter& w = *n.param;
      const std::size_t rows = w.value.rows();
      const std::size_t cols = w.value.cols();
      const std::uint32_t x = n.args[0];
      kern.ger(w.gradient.data().data(), rows, cols, gy.data(), nodes_[x].value.data());
      kern.axpy(1.0, gy.data(), n.param2->gradient.data().data(), rows);
      if (nodes_[x].op != Op::input) {
        kern.gemv_t(w.value.data().data(), rows, cols, gy.data(), grad_of(x).data());
      }
      break;
    }
    case Op::add: {
      for (std::uint32_t a : n.args) kern.axpy(1.0, gy.data(), grad_of(a).data(), gy.size());
      break;
    }
    case Op::mul: {
      const auto& va = nodes_[n.args[0]].value;
      const auto& vb = nodes_[n.args[1]].value;
      auto& ga = grad_of(n.args[0]);
      auto& gb = grad_of(n.args[1]);
      for (std::size_t i = 0; i < gy.size(); ++i) {
        ga[i] += gy[i] * vb[i];
        gb[i] += gy[i] * va[i];
      }
      break;
    }
    case Op::scale: {
      kern.axpy(n.k, gy.data(), grad_of(n.args[0]).data(), gy.size());
      break;
    }
    case Op::tanh: {
      auto& ga = grad_of(n.args[0]);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * (1.0 - n.value[i] * n.value[i]);
      break;
    }
    case Op::sigmoid: {
      auto& ga = grad_of(n.args[0]);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * n.value[i] * (1.0 - n.value[i]);
      break;
    }
    case Op::softmax: {
      const double dotp = kern.dot(gy.data(), n.value.data(), gy.size());
      auto& ga = grad_of(n.args[0]);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += n.value[i] * (gy[i] - dotp);
      break;
    }
    case Op::concat: {
      std::size_t off = 0;
      for (std::uint32_t a : n.args) {
        const std::size_t len = nodes_[a].value.size();
        kern.axpy(1.0, gy.data() + off, grad_of(a).data(), len);
        off += len;
      }
      break;
    }
    case Op::slice: {
      kern.axpy(1.0, gy.data(), grad_of(n.args[0]).data() + n.index, gy.size());
      break;
    }
    case Op::mse: {
      const auto& p = nodes_[n.args[0]].value;
      const auto& t = nodes_[n.args[1]].value;
      const double k = 2.0 * gy[0] / static_cast<double>(p.size());
      auto& gp = grad_of(n.args[0]);
      auto& gt = grad_of(n.args[1]);
      for (std::size_t i = 0; i < p.size(); ++i) {
        gp[i] += k * (p[i] - t[i]);
        gt[i] -= k * (p[i] - t[i]);
      }
      break;
    }
    case Op::mae: {
      const auto& p = nodes_[n.args[0]].value;
      const auto& t = nodes_[n.args[1]].value;
      const double k = gy[0] / static_cast<double>(p.size());
      auto& gp = grad_of(n.args[0]);
      auto& gt = grad_of(n.args[1]);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        gp[i] += k * sign;
        gt[i] -= k * sign;
      }
      break;
    }
    case Op::margin: {
      if (n.value[0] > 0.0) {
        auto& gs = grad_of(n.args[0]);
        gs[n.index] -= gy[0];
        gs[static_cast<std::size_t>(n.k)] += gy[0];
      }
      break;
    }
    case Op::xent: {
      const auto& s = nodes_[n.args[0]].value;
      const double mx = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (double v : s) z += std::exp(v - mx);
      auto& gs = grad_of(n.args[0]);
      for (std::size_t i = 0; i < s.size(); ++i) {
        gs[i] += gy[0] * (std::exp(s[i] - mx) / z - (i == n.index ? 1.0 : 0.0));
      }
      break;
    }
    case Op::sum: {
      for (std::uint32_t a : n.args) grad_of(a)[0] += gy[0];
      break;
    }
  }
}

}  // namespace lhr::nn
