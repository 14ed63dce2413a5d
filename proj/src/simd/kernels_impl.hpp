#pragma once

#include "lhr/simd/kernels.hpp"

namespace lhr::simd::detail {

// Defined in the per-ISA translation units that are compiled for this target.
#if defined(LHR_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif
#if defined(LHR_HAVE_NEON_KERNELS)
const KernelTable& neon_table();
#endif

}  // namespace lhr::simd::detail
