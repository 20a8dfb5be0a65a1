#include "pmsfem/linalg/dense.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pmsfem::linalg {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::leading_columns(std::size_t count) const {
  count = std::min(count, cols_);
  DenseMatrix out(rows_, count);
  std::copy(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(rows_ * count), out.values_.begin());
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "multiply: inner dimensions differ");
  const auto& k = simd::kernels();
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double blj = b(l, j);
      if (blj != 0.0) k.axpy(blj, a.col(l).data(), cj.data(), a.rows());
    }
  }
  return c;
}

DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "multiply_transposed: row counts differ");
  const auto& k = simd::kernels();
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = k.dot(a.col(i).data(), b.col(j).data(), a.rows());
  return c;
}

Vector multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "multiply: vector length differs");
  const auto& k = simd::kernels();
  Vector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (x[j] != 0.0) k.axpy(x[j], a.col(j).data(), y.data(), a.rows());
  return y;
}

double frobenius_norm(const DenseMatrix& a) {
  const std::size_t n = a.rows() * a.cols();
  return std::sqrt(simd::kernels().dot(a.data(), a.data(), n));
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  const std::size_t n = a.rows() * a.cols();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.data()[i]));
  return m;
}

double norm2(std::span<const double> x) { return std::sqrt(simd::kernels().dot(x.data(), x.data(), x.size())); }

double asymmetry(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "asymmetry: matrix is not square");
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

void symmetrize(DenseMatrix& a) {
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

Vector lu_solve(DenseMatrix a, std::span<const double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw Error(ErrorCode::DimensionMismatch, "lu_solve: shape mismatch");
  Vector x(b.begin(), b.end());
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= 1e-14 * scale)
      throw Error(ErrorCode::SingularMatrix, "lu_solve: zero pivot in column " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(x[k], x[piv]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) *= inv;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double akj = a(k, j);
      if (akj == 0.0) continue;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= a(i, k) * akj;
    }
    for (std::size_t i = k + 1; i < n; ++i) x[i] -= a(i, k) * x[k];
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

PivotedCholesky pivoted_cholesky(const DenseMatrix& gram, double rel_tol) {
  const std::size_t n = gram.rows();
  if (gram.cols() != n) throw Error(ErrorCode::DimensionMismatch, "pivoted_cholesky: matrix is not square");
  const auto& k = simd::kernels();

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Vector diag(n), orig(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = orig[i] = gram(i, i);

  // Row i of the factor lives at factor[i * n], so partial rows are contiguous.
  std::vector<double> factor(n * n, 0.0);
  PivotedCholesky out;
  std::size_t step = 0;
  for (; step < n; ++step) {
    std::size_t best = step;
    double best_ratio = -1.0;
    for (std::size_t p = step; p < n; ++p) {
      const std::size_t i = order[p];
      const double ratio = orig[i] > 0.0 ? diag[i] / orig[i] : 0.0;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = p;
      }
    }
    if (best_ratio <= rel_tol) break;
    std::swap(order[step], order[best]);
    const std::size_t j = order[step];
    const double pivot = std::sqrt(diag[j]);
    double* lj = factor.data() + j * n;
    lj[step] = pivot;
    for (std::size_t p = step + 1; p < n; ++p) {
      const std::size_t i = order[p];
      double* li = factor.data() + i * n;
      const double v = (gram(i, j) - k.dot(li, lj, step)) / pivot;
      li[step] = v;
      diag[i] -= v * v;
    }
    out.retained.push_back(j);
  }
  for (std::size_t p = step; p < n; ++p) out.dependent.push_back(order[p]);
  return out;
}

} // namespace pmsfem::linalg
