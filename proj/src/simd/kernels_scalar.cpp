#include "lhr/simd/kernels.hpp"

#include <cmath>

#include "kernels_impl.hpp"

namespace lhr::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(w + r * cols, x, cols);
}

void gemv_t_scalar(const double* w, std::size_t rows, std::size_t cols, const double* gy,
                   double* gx) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (gy[r] != 0.0) axpy_scalar(gy[r], w + r * cols, gx, cols);
  }
}

void ger_scalar(double* gw, std::size_t rows, std::size_t cols, const double* gy, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (gy[r] != 0.0) axpy_scalar(gy[r], x, gw + r * cols, cols);
  }
}

void adam_scalar(double* value, double* grad, double* m, double* v, std::size_t n, double beta1,
                 double beta2, double step_size, double eps_hat) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g * g);
    value[i] -= step_size * m[i] / (std::sqrt(v[i]) + eps_hat);
    grad[i] = 0.0;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, dot_scalar,  axpy_scalar, gemv_scalar,
                                 gemv_t_scalar, ger_scalar, adam_scalar};
  return table;
}

}  // namespace lhr::simd
