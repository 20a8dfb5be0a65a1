#pragma once

#include "pmsfem/linalg/sparse.hpp"

#include <memory>
#include <span>

namespace pmsfem::linalg {

/// Sparse Cholesky (fill-reducing AMD ordering) of an SPD matrix.
/// Throws NotPositiveDefinite when a pivot is not positive.
class SpdSolver {
public:
  explicit SpdSolver(const SparseSym& a);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  int size() const noexcept { return n_; }
  Vector solve(std::span<const double> b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

/// Sparse LU with partial pivoting for symmetric indefinite (saddle-point) systems.
/// Throws SingularMatrix when the factorization or a solve breaks down.
class IndefiniteSolver {
public:
  explicit IndefiniteSolver(const SparseSym& k);
  ~IndefiniteSolver();
  IndefiniteSolver(IndefiniteSolver&&) noexcept;
  IndefiniteSolver& operator=(IndefiniteSolver&&) noexcept;

  int size() const noexcept { return n_; }
  Vector solve(std::span<const double> b) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

Vector sparse_solve_spd(const SparseSym& a, std::span<const double> b);
Vector sparse_solve_sym_indefinite(const SparseSym& k, std::span<const double> b);

} // namespace pmsfem::linalg
