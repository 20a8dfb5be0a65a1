#pragma once

#include "pmsfem/linalg/dense.hpp"

#include <span>
#include <vector>

namespace pmsfem::linalg {

struct Triplet {
  int row;
  int col;
  double value;
};

class CsrMatrix;

/// Symmetric matrix in CSR form; only the upper triangle (col >= row) is stored.
class SparseSym {
public:
  SparseSym() = default;

  /// Duplicates are summed. A triplet below the diagonal is mirrored to its
  /// upper position, so each off-diagonal entry should be supplied once.
  static SparseSym from_triplets(int n, std::span<const Triplet> triplets);

  int size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double entry(int i, int j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;
  /// xᵀ A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  /// Principal submatrix on the given (ascending or not) index list.
  SparseSym submatrix(std::span<const int> keep) const;
  /// General block A(rows, cols).
  CsrMatrix block(std::span<const int> rows, std::span<const int> cols) const;

  CsrMatrix to_full() const;
  DenseMatrix to_dense() const;

  friend bool operator==(const SparseSym&, const SparseSym&) = default;

private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// General rectangular CSR matrix.
class CsrMatrix {
public:
  CsrMatrix() = default;
  static CsrMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  const std::vector<int>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<int>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;
  /// y = Aᵀ x
  Vector multiply_transposed(std::span<const double> x) const;
  CsrMatrix transpose() const;
  DenseMatrix to_dense() const;

  /// Keep only the listed rows, in the given order.
  CsrMatrix select_rows(std::span<const std::size_t> rows) const;

private:
  friend CsrMatrix multiply(const CsrMatrix&, const CsrMatrix&);
  friend class SparseSym;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

/// R A Rᵀ for symmetric A; the result keeps exact symmetry.
SparseSym congruence(const CsrMatrix& r, const SparseSym& a);

/// Dense Ψᵀ A Ψ.
DenseMatrix congruence(const DenseMatrix& psi, const SparseSym& a);

} // namespace pmsfem::linalg
