// NEON variants for AArch64, where Advanced SIMD with float64 lanes is baseline.

#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace lhr::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_neon(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot_neon(w + r * cols, x, cols);
}

void gemv_t_neon(const double* w, std::size_t rows, std::size_t cols, const double* gy,
                 double* gx) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (gy[r] != 0.0) axpy_neon(gy[r], w + r * cols, gx, cols);
  }
}

void ger_neon(double* gw, std::size_t rows, std::size_t cols, const double* gy, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (gy[r] != 0.0) axpy_neon(gy[r], x, gw + r * cols, cols);
  }
}

void adam_neon(double* value, double* grad, double* m, double* v, std::size_t n, double beta1,
               double beta2, double step_size, double eps_hat) {
  const float64x2_t b1 = vdupq_n_f64(beta1), c1 = vdupq_n_f64(1.0 - beta1);
  const float64x2_t b2 = vdupq_n_f64(beta2), c2 = vdupq_n_f64(1.0 - beta2);
  const float64x2_t step = vdupq_n_f64(step_size), eps = vdupq_n_f64(eps_hat);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t vm = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(c1, g));
    const float64x2_t vv = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(c2, vmulq_f64(g, g)));
    const float64x2_t upd = vdivq_f64(vmulq_f64(step, vm), vaddq_f64(vsqrtq_f64(vv), eps));
    vst1q_f64(m + i, vm);
    vst1q_f64(v + i, vv);
    vst1q_f64(value + i, vsubq_f64(vld1q_f64(value + i), upd));
    vst1q_f64(grad + i, vdupq_n_f64(0.0));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g * g);
    value[i] -= step_size * m[i] / (std::sqrt(v[i]) + eps_hat);
    grad[i] = 0.0;
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{Isa::neon, dot_neon, axpy_neon, gemv_neon,
                                 gemv_t_neon, ger_neon, adam_neon};
  return table;
}

}  // namespace lhr::simd::detail
