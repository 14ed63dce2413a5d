#include "lhr/nn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "lhr/error.hpp"

namespace lhr::nn {

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) throw InvalidInput("mse_loss: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double mae_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) throw InvalidInput("mae_loss: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double margin_loss(std::span<const double> scores, std::size_t gold) {
  if (gold >= scores.size()) throw InvalidInput("margin_loss: gold index out of range");
  bool any = false;
  double best = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (k == gold) continue;
    if (!any || scores[k] > best) best = scores[k];
    any = true;
  }
  return any ? std::max(0.0, 1.0 - scores[gold] + best) : 0.0;
}

}  // namespace lhr::nn
