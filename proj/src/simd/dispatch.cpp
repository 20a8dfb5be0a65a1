#include "tables.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pmsfem::simd {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
  case Isa::Scalar: return "scalar";
  case Isa::Avx2: return "avx2";
  case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
  case Isa::Scalar:
    return true;
  case Isa::Avx2:
#if defined(PMSFEM_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
  case Isa::Neon:
#if defined(PMSFEM_HAVE_NEON_TU)
    return true;
#else
    return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("SIMD variant not available: " + std::string(to_string(isa)));
  switch (isa) {
#if defined(PMSFEM_HAVE_AVX2_TU)
  case Isa::Avx2: return detail::avx2_table();
#endif
#if defined(PMSFEM_HAVE_NEON_TU)
  case Isa::Neon: return detail::neon_table();
#endif
  default: return detail::scalar_table();
  }
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("PMSFEM_SIMD"); env != nullptr && std::string_view(env) == "scalar")
    return detail::scalar_table();
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  if (isa_available(Isa::Neon)) return kernels_for(Isa::Neon);
  return detail::scalar_table();
}

} // namespace

const KernelTable& kernels() {
  static const KernelTable& table = select();
  return table;
}

} // namespace pmsfem::simd
