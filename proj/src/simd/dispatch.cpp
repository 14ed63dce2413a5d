#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

#include "kernels_impl.hpp"
#include "lhr/error.hpp"

namespace lhr::simd {
namespace {

std::atomic<const KernelTable*> g_override{nullptr};

const KernelTable& detect() {
  if (const char* env = std::getenv("LHR_FORCE_SCALAR"); env != nullptr && *env != '\0' && *env != '0') {
    return scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return *t;
  if (const KernelTable* t = neon_kernels()) return *t;
  return scalar_kernels();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(LHR_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(LHR_HAVE_NEON_KERNELS)
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  if (const KernelTable* t = g_override.load(std::memory_order_relaxed)) return *t;
  static const KernelTable& best = detect();
  return best;
}

bool force_isa(Isa isa) {
  const KernelTable* t = nullptr;
  switch (isa) {
    case Isa::scalar: t = &scalar_kernels(); break;
    case Isa::avx2: t = avx2_kernels(); break;
    case Isa::neon: t = neon_kernels(); break;
  }
  if (t == nullptr) return false;
  g_override.store(t, std::memory_order_relaxed);
  return true;
}

void reset_isa() { g_override.store(nullptr, std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("dot: length mismatch");
  return kernels().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("cosine_similarity: length mismatch");
  const double na = std::sqrt(squared_norm(a));
  const double nb = std::sqrt(squared_norm(b));
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace lhr::simd
