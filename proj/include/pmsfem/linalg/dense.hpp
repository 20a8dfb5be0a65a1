#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pmsfem::linalg {

using Vector = std::vector<double>;

/// Column-major dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {values_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {values_.data() + j * rows_, rows_}; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  DenseMatrix transpose() const;
  /// First `count` columns.
  DenseMatrix leading_columns(std::size_t count) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ b
DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b);
Vector multiply(const DenseMatrix& a, std::span<const double> x);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double norm2(std::span<const double> x);

/// Largest |a_ij - a_ji|.
double asymmetry(const DenseMatrix& a);
void symmetrize(DenseMatrix& a);

/// Dense LU with partial pivoting. Throws SingularMatrix for a (numerically) zero pivot.
Vector lu_solve(DenseMatrix a, std::span<const double> b);

struct PivotedCholesky {
  /// Retained columns, in pivot order.
  std::vector<std::size_t> retained;
  /// Columns whose residual fell below the cutoff (linearly dependent on `retained`).
  std::vector<std::size_t> dependent;
  std::size_t rank() const noexcept { return retained.size(); }
};

/// Greedy rank-revealing Cholesky of a symmetric positive semidefinite Gram
/// matrix. Column j is dependent once its Schur-complement diagonal drops to
/// rel_tol * G(j, j) or below.
PivotedCholesky pivoted_cholesky(const DenseMatrix& gram, double rel_tol);

} // namespace pmsfem::linalg
