#pragma once

#include "pmsfem/simd/kernels.hpp"

namespace pmsfem::simd::detail {

const KernelTable& scalar_table() noexcept;
#if defined(PMSFEM_HAVE_AVX2_TU)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(PMSFEM_HAVE_NEON_TU)
const KernelTable& neon_table() noexcept;
#endif

} // namespace pmsfem::simd::detail
