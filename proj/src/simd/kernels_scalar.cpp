#include "tables.hpp"

namespace pmsfem::simd::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rotate_scalar(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

double gather_dot_scalar(const int* idx, const double* val, const double* x, std::size_t nnz) {
  double acc = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) acc += val[k] * x[idx[k]];
  return acc;
}

} // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::Scalar, dot_scalar, axpy_scalar, rotate_scalar, gather_dot_scalar};
  return table;
}

} // namespace pmsfem::simd::detail
