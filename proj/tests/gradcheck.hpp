#pragma once

// Central finite-difference oracle for analytical gradients. Test-only: it
// perturbs parameter values and re-runs the forward pass, never touching the
// tape's backward code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "lhr/nn/graph.hpp"
#include "lhr/nn/parameter.hpp"

namespace lhr::testing {

struct GradCheckResult {
  double max_relative_error = 0.0;  // plain central difference, every entry
  std::string worst_parameter;
  std::size_t checked = 0;
  // Entries too small for eps to resolve at `tol` given the roundoff of the
  // loss; they are also checked with a Richardson extrapolation at wider steps
  // and count as the better of the two estimates.
  std::size_t below_resolution = 0;
  double max_extrapolated_error = 0.0;
  // Worst error after the roundoff entries are replaced by their re-check.
  double max_resolved_error = 0.0;
  std::string worst_resolved;
};

// Differences are measured relative to max(|analytic|, |numeric|, floor).
// The floor keeps entries whose true gradient is ~0 from dividing roundoff by
// roundoff.
inline constexpr double kGradFloor = 1e-7;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
}

// Roundoff of one forward pass, in units of machine epsilon times |loss|.
inline constexpr double kRoundoffUlps = 16.0;

// `build` constructs the scalar loss on a fresh graph. Every parameter entry is
// compared; `stride` > 1 samples entries of large tensors.
inline GradCheckResult check_gradients(nn::ParameterSet& params,
                                       const std::function<nn::Expr(nn::Graph&)>& build,
                                       double eps = 1e-5, std::size_t stride = 1, double tol = 1e-4) {
  params.zero_gradients();
  double loss;
  {
    nn::Graph g;
    const auto l = build(g);
    loss = g.scalar(l);
    g.backward(l);
  }
  const double roundoff = kRoundoffUlps * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(loss)) / eps;
  GradCheckResult result;
  for (auto& p : params) {
    auto values = p->value.data();
    for (std::size_t i = 0; i < values.size(); i += stride) {
      const double saved = values[i];
      auto central = [&](double h) {
        values[i] = saved + h;
        double plus;
        {
          nn::Graph g;
          plus = g.scalar(build(g));
        }
        values[i] = saved - h;
        double minus;
        {
          nn::Graph g;
          minus = g.scalar(build(g));
        }
        values[i] = saved;
        return (plus - minus) / (2.0 * h);
      };
      const double analytic = p->gradient[i];
      const double numeric = central(eps);
      double err = relative_error(analytic, numeric);
      ++result.checked;
      const std::string where = p->name + "[" + std::to_string(i) + "]";
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = where;
      }
      if (std::max(std::abs(analytic), std::abs(numeric)) < roundoff / tol) {
        // Wide steps beat roundoff but may straddle a kink that eps does not.
        const double wide = 50.0 * eps;
        const double extrapolated = (4.0 * central(wide) - central(2.0 * wide)) / 3.0;
        const double wide_err = relative_error(analytic, extrapolated);
        ++result.below_resolution;
        result.max_extrapolated_error = std::max(result.max_extrapolated_error, std::min(wide_err, err));
        err = std::min(err, wide_err);
      }
      if (err > result.max_resolved_error) {
        result.max_resolved_error = err;
        result.worst_resolved = where;
      }
    }
  }
  params.zero_gradients();
  return result;
}

}  // namespace lhr::testing
