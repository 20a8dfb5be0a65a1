#include "pmsfem/linalg/solvers.hpp"

#include "pmsfem/error.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace pmsfem::linalg {
namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen_upper(const SparseSym& a) {
  // CSR upper triangle == CSC lower triangle of the same symmetric matrix;
  // build from triplets to keep ownership simple.
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nonzeros());
  for (int i = 0; i < a.size(); ++i)
    for (int p = a.row_ptr()[static_cast<std::size_t>(i)]; p < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p)
      t.emplace_back(i, a.col_idx()[static_cast<std::size_t>(p)], a.values()[static_cast<std::size_t>(p)]);
  EigenSparse m(a.size(), a.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

EigenSparse to_eigen_full(const SparseSym& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * a.nonzeros());
  for (int i = 0; i < a.size(); ++i)
    for (int p = a.row_ptr()[static_cast<std::size_t>(i)]; p < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++p) {
      const int j = a.col_idx()[static_cast<std::size_t>(p)];
      const double v = a.values()[static_cast<std::size_t>(p)];
      t.emplace_back(i, j, v);
      if (i != j) t.emplace_back(j, i, v);
    }
  EigenSparse m(a.size(), a.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void check_rhs(std::span<const double> b, int n) {
  if (b.size() != static_cast<std::size_t>(n)) throw Error(ErrorCode::DimensionMismatch, "solver: rhs length");
}

bool all_finite(const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

} // namespace

struct SpdSolver::Impl {
  Eigen::SimplicialLLT<EigenSparse, Eigen::Upper, Eigen::AMDOrdering<int>> llt;
};

SpdSolver::SpdSolver(const SparseSym& a) : impl_(std::make_unique<Impl>()), n_(a.size()) {
  if (n_ == 0) return;
  impl_->llt.compute(to_eigen_upper(a));
  if (impl_->llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "sparse Cholesky met a nonpositive pivot (n=" + std::to_string(n_) + ")");
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::solve(std::span<const double> b) const {
  check_rhs(b, n_);
  if (n_ == 0) return {};
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n_);
  const Eigen::VectorXd x = impl_->llt.solve(rhs);
  return Vector(x.data(), x.data() + n_);
}

DenseMatrix SpdSolver::solve(const DenseMatrix& b) const {
  if (b.rows() != static_cast<std::size_t>(n_)) throw Error(ErrorCode::DimensionMismatch, "solver: rhs rows");
  DenseMatrix x(b.rows(), b.cols());
  if (n_ == 0 || b.cols() == 0) return x;
  const Eigen::Map<const Eigen::MatrixXd> rhs(b.data(), n_, static_cast<Eigen::Index>(b.cols()));
  Eigen::Map<Eigen::MatrixXd>(x.data(), n_, static_cast<Eigen::Index>(b.cols())) = impl_->llt.solve(rhs);
  return x;
}

struct IndefiniteSolver::Impl {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  EigenSparse matrix;
};

IndefiniteSolver::IndefiniteSolver(const SparseSym& k) : impl_(std::make_unique<Impl>()), n_(k.size()) {
  if (n_ == 0) return;
  impl_->matrix = to_eigen_full(k);
  impl_->matrix.makeCompressed();
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success)
    throw Error(ErrorCode::SingularMatrix, "sparse LU failed: " + impl_->lu.lastErrorMessage());
}

IndefiniteSolver::~IndefiniteSolver() = default;
IndefiniteSolver::IndefiniteSolver(IndefiniteSolver&&) noexcept = default;
IndefiniteSolver& IndefiniteSolver::operator=(IndefiniteSolver&&) noexcept = default;

Vector IndefiniteSolver::solve(std::span<const double> b) const {
  check_rhs(b, n_);
  if (n_ == 0) return {};
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n_);
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !all_finite(x))
    throw Error(ErrorCode::SingularMatrix, "sparse LU solve produced non-finite values");
  // One step of iterative refinement; then reject a solution that does not solve the system.
  const Eigen::VectorXd r = rhs - impl_->matrix * x;
  x += impl_->lu.solve(r);
  const double res = (rhs - impl_->matrix * x).norm();
  if (!all_finite(x) || res > 1e-6 * std::max(rhs.norm(), 1e-300))
    throw Error(ErrorCode::SingularMatrix, "sparse LU residual too large (matrix numerically singular)");
  return Vector(x.data(), x.data() + n_);
}

Vector sparse_solve_spd(const SparseSym& a, std::span<const double> b) { return SpdSolver(a).solve(b); }

Vector sparse_solve_sym_indefinite(const SparseSym& k, std::span<const double> b) {
  return IndefiniteSolver(k).solve(b);
}

} // namespace pmsfem::linalg
