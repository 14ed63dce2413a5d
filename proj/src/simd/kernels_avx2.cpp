// AVX2 + FMA variants. Only the functions in this file carry the target
// attribute, so the rest of the library stays runnable on baseline x86-64.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

#define LHR_AVX2 __attribute__((target("avx2,fma")))

namespace lhr::simd::detail {
namespace {

LHR_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

LHR_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

LHR_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

LHR_AVX2 void gemv_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x,
                        double* y) {
  std::size_t r = 0;
  // four rows at a time share each load of x
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d vx = _mm256_loadu_pd(x + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), vx, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), vx, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), vx, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), vx, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; c < cols; ++c) {
      s0 += w0[c] * x[c];
      s1 += w1[c] * x[c];
      s2 += w2[c] * x[c];
      s3 += w3[c] * x[c];
    }
    y[r] += s0;
    y[r + 1] += s1;
    y[r + 2] += s2;
    y[r + 3] += s3;
  }
  for (; r < rows; ++r) y[r] += dot_avx2(w + r * cols, x, cols);
}

LHR_AVX2 void gemv_t_avx2(const double* w, std::size_t rows, std::size_t cols, const double* gy,
                          double* gx) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (gy[r] != 0.0) axpy_avx2(gy[r], w + r * cols, gx, cols);
  }
}

LHR_AVX2 void ger_avx2(double* gw, std::size_t rows, std::size_t cols, const double* gy,
                       const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (gy[r] != 0.0) axpy_avx2(gy[r], x, gw + r * cols, cols);
  }
}

// No FMA here: the update must round exactly like the scalar reference.
LHR_AVX2 void adam_avx2(double* value, double* grad, double* m, double* v, std::size_t n,
                        double beta1, double beta2, double step_size, double eps_hat) {
  const __m256d b1 = _mm256_set1_pd(beta1), c1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d b2 = _mm256_set1_pd(beta2), c2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d step = _mm256_set1_pd(step_size), eps = _mm256_set1_pd(eps_hat);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d vm = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(c1, g));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
    const __m256d upd = _mm256_div_pd(_mm256_mul_pd(step, vm), _mm256_add_pd(_mm256_sqrt_pd(vv), eps));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    _mm256_storeu_pd(value + i, _mm256_sub_pd(_mm256_loadu_pd(value + i), upd));
    _mm256_storeu_pd(grad + i, zero);
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

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2, dot_avx2, axpy_avx2, gemv_avx2,
                                 gemv_t_avx2, ger_avx2, adam_avx2};
  return table;
}

}  // namespace lhr::simd::detail
