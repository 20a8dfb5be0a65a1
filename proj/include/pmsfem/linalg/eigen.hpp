#pragma once

#include "pmsfem/linalg/dense.hpp"

namespace pmsfem::linalg {

struct SymmetricEigen {
  Vector values;        ///< ascending
  DenseMatrix vectors;  ///< orthonormal columns, matching `values`
};

/// Matrices up to this order use Jacobi; larger ones the tridiagonal QL path.
inline constexpr std::size_t kJacobiLimit = 200;

/// Dense symmetric eigensolver. Throws NonSymmetric if |a_ij - a_ji| > 1e-12 * max|a|.
SymmetricEigen eig_sym(const DenseMatrix& a);

/// Cyclic Jacobi; stops once the off-diagonal norm is below 1e-12 ||A||_F.
SymmetricEigen eig_sym_jacobi(const DenseMatrix& a);

/// Householder tridiagonalisation followed by implicit QL.
SymmetricEigen eig_sym_tridiagonal(const DenseMatrix& a);

struct GeneralizedEigen {
  Vector values;            ///< ascending
  DenseMatrix vectors;      ///< S-orthonormal: VᵀSV = I
  std::size_t mass_rank = 0;  ///< dimension of the retained range of S
};

/// Pencil A v = λ S v restricted to the numerical range of S.
///
/// S is diagonalised first; modes with s_i <= rank_tol * max(s) are dropped and
/// the pencil is reduced to a standard problem on the remaining subspace. This
/// tolerates the near-singular Gram matrices produced by redundant snapshots.
/// When a Cholesky factor of S proves every s_i above the cutoff, the
/// reduction goes through the factor instead (same result, half the work).
GeneralizedEigen eig_sym_generalized(const DenseMatrix& a, const DenseMatrix& s, double rank_tol = 1e-10);

struct Orthonormalized {
  DenseMatrix q;
  std::size_t rank = 0;
};

/// Orthonormal basis for the span of the singular directions of M with
/// σ > tol * σ_max (one-sided Jacobi SVD), ordered by decreasing σ.
Orthonormalized orthonormalize_cols(const DenseMatrix& m, double tol);

} // namespace pmsfem::linalg
