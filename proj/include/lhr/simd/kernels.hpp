#pragma once

// Dense double-precision kernels used by every layer of the network.
//
// Each kernel has a scalar reference implementation plus vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked once at runtime
// from the CPU features; tests force each variant and compare it against the
// scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace lhr::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // y += W x, W row-major rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);

  // gx += W^T gy
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* gy, double* gx);

  // gw += gy x^T
  void (*ger)(double* gw, std::size_t rows, std::size_t cols, const double* gy, const double* x);

  // Bias-corrected Adam update over n entries; resets grad to zero.
  // step_size = lr * sqrt(1 - beta2^t) / (1 - beta1^t), eps_hat = eps * sqrt(1 - beta2^t).
  void (*adam)(double* value, double* grad, double* m, double* v, std::size_t n, double beta1,
               double beta2, double step_size, double eps_hat);
};

const KernelTable& scalar_kernels();
// nullptr when the variant is not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Best table for the running CPU, unless overridden.
const KernelTable& kernels();

// Pin dispatch to one variant; returns false if it is unavailable here.
bool force_isa(Isa isa);
void reset_isa();

// Convenience wrappers over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

// a.b / (|a||b|); returns 0 when either norm is below 1e-12.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace lhr::simd
