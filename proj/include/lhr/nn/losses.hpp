#pragma once

#include <cstddef>
#include <span>

namespace lhr::nn {

// Value-only forms of the training losses; Graph::mse / Graph::margin are the
// differentiable versions.
double mse_loss(std::span<const double> pred, std::span<const double> target);
double mae_loss(std::span<const double> pred, std::span<const double> target);
// max(0, 1 - s[gold] + max_{k != gold} s[k])
double margin_loss(std::span<const double> scores, std::size_t gold);

}  // namespace lhr::nn
