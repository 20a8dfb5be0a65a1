#pragma once

// Data-parallel inner loops used by the dense and sparse linear algebra.
//
// Every kernel has a scalar reference implementation; ISA-specific variants
// (AVX2+FMA on x86-64, NEON on aarch64) are selected once at runtime. Setting
// the environment variable PMSFEM_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace pmsfem::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// (x, y) <- (c x - s y, s x + c y), elementwise
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);
  /// sum_k val[k] * x[idx[k]]  (one CSR row times a dense vector)
  double (*gather_dot)(const int* idx, const double* val, const double* x, std::size_t nnz);
};

/// Kernels picked for this process (cached after the first call).
const KernelTable& kernels();

/// A specific variant; throws std::invalid_argument if it is not available on this machine.
const KernelTable& kernels_for(Isa isa);

bool isa_available(Isa isa) noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  kernels().axpy(a, x.data(), y.data(), x.size());
}

inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  kernels().rotate(x.data(), y.data(), x.size(), c, s);
}

} // namespace pmsfem::simd
