#include "pmsfem/linalg/eigen.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pmsfem::linalg {
namespace {

constexpr int kMaxSweeps = 100;
constexpr int kMaxQlIterations = 60;

void require_symmetric(const DenseMatrix& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is not square");
  const double scale = max_abs(a);
  if (asymmetry(a) > 1e-12 * std::max(scale, 1e-300))
    throw Error(ErrorCode::NonSymmetric, std::string(what) + " is not symmetric within 1e-12");
}

SymmetricEigen sorted(Vector values, const DenseMatrix& vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(vectors.rows(), n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = values[order[k]];
    std::copy(vectors.col(order[k]).begin(), vectors.col(order[k]).end(), out.vectors.col(k).begin());
  }
  return out;
}

} // namespace

SymmetricEigen eig_sym(const DenseMatrix& input) {
  return input.rows() > kJacobiLimit ? eig_sym_tridiagonal(input) : eig_sym_jacobi(input);
}

SymmetricEigen eig_sym_jacobi(const DenseMatrix& input) {
  require_symmetric(input, "eig_sym input");
  const std::size_t n = input.rows();
  DenseMatrix a = input;
  symmetrize(a);
  DenseMatrix v = DenseMatrix::identity(n);
  const auto& k = simd::kernels();

  const double total = frobenius_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps && total > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t q = 1; q < n; ++q) {
      const auto cq = a.col(q);
      off += k.dot(cq.data(), cq.data(), q);
    }
    if (std::sqrt(2.0 * off) <= 1e-12 * total) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // Rotate columns p and q (contiguous), then restore the 2x2 block and
        // mirror the two columns into rows p and q.
        k.rotate(a.col(p).data(), a.col(q).data(), n, c, s);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a(p, r) = a(r, p);
          a(q, r) = a(r, q);
        }
        k.rotate(v.col(p).data(), v.col(q).data(), n, c, s);
      }
    }
  }

  Vector values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  return sorted(std::move(values), v);
}

SymmetricEigen eig_sym_tridiagonal(const DenseMatrix& input) {
  require_symmetric(input, "eig_sym input");
  const std::size_t n = input.rows();
  if (n == 0) return {};

  // Householder reduction on a row-major copy; z[i * n + j] holds row i.
  std::vector<double> z(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) z[i * n + j] = 0.5 * (input(i, j) + input(j, i));
  const auto at = [&](std::size_t i, std::size_t j) -> double& { return z[i * n + j]; };
  Vector d(n, 0.0), e(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(at(i, k));
      if (scale == 0.0) {
        e[i] = at(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          at(j, i) = at(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          e[j] = g / h;
          f += e[j] * at(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = at(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) at(j, k) -= f * e[k] + g * at(i, k);
        }
      }
    } else {
      e[i] = at(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += at(i, k) * at(k, j);
        for (std::size_t k = 0; k < i; ++k) at(k, j) -= g * at(k, i);
      }
    }
    d[i] = at(i, i);
    at(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) at(j, i) = at(i, j) = 0.0;
  }

  // Column j of v is column j of the accumulated transformation.
  DenseMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = at(i, j);

  // Implicit QL with Wilkinson-type shifts on the tridiagonal (d, e).
  const auto& k = simd::kernels();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (iter++ == kMaxQlIterations) throw Error(ErrorCode::SingularMatrix, "tridiagonal QL iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        k.rotate(v.col(i).data(), v.col(i + 1).data(), n, c, s);
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (true);
  }
  return sorted(std::move(d), v);
}

namespace {

// Lower-triangular inverse of the Cholesky factor of s, or empty if s is not
// numerically positive definite.
DenseMatrix inverse_cholesky_factor(const DenseMatrix& s) {
  const std::size_t n = s.rows();
  DenseMatrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return {};
    const double pivot = std::sqrt(d);
    l(j, j) = pivot;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / pivot;
    }
  }
  DenseMatrix inv(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = 0.0;
      for (std::size_t k = j; k < i; ++k) v -= l(i, k) * inv(k, j);
      inv(i, j) = v / l(i, i);
    }
  }
  return inv;
}

} // namespace

GeneralizedEigen eig_sym_generalized(const DenseMatrix& a, const DenseMatrix& s, double rank_tol) {
  require_symmetric(a, "stiffness pencil matrix");
  require_symmetric(s, "mass pencil matrix");
  if (a.rows() != s.rows()) throw Error(ErrorCode::DimensionMismatch, "pencil matrices differ in size");
  const std::size_t n = a.rows();
  if (!(max_abs(s) > 1e-300)) throw Error(ErrorCode::ZeroMassSpace, "mass matrix of the pencil is numerically zero");

  // λ_min(S) >= 1 / ||L⁻¹||_F² and λ_max(S) <= ||S||_F: if the bound clears the
  // cutoff no mode would be dropped and the factor gives the same pencil.
  if (DenseMatrix linv = inverse_cholesky_factor(s); !linv.empty()) {
    const double inv_norm = frobenius_norm(linv);
    if (1.0 / (inv_norm * inv_norm) > rank_tol * frobenius_norm(s)) {
      DenseMatrix reduced = multiply(linv, multiply(a, linv.transpose()));
      symmetrize(reduced);
      const SymmetricEigen standard = eig_sym(reduced);
      GeneralizedEigen out;
      out.values = standard.values;
      out.vectors = multiply_transposed(linv, standard.vectors);
      out.mass_rank = n;
      return out;
    }
  }

  const SymmetricEigen mass = eig_sym(s);
  const double smax = n > 0 ? mass.values.back() : 0.0;
  if (!(smax > 0.0) || smax <= 1e-300) throw Error(ErrorCode::ZeroMassSpace, "mass matrix of the pencil is numerically zero");

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (mass.values[i] > rank_tol * smax) keep.push_back(i);

  DenseMatrix w(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double scale = 1.0 / std::sqrt(mass.values[keep[c]]);
    const auto src = mass.vectors.col(keep[c]);
    auto dst = w.col(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] * scale;
  }

  DenseMatrix reduced = multiply_transposed(w, multiply(a, w));
  symmetrize(reduced);
  const SymmetricEigen standard = eig_sym(reduced);

  GeneralizedEigen out;
  out.values = standard.values;
  out.vectors = multiply(w, standard.vectors);
  out.mass_rank = keep.size();
  return out;
}

Orthonormalized orthonormalize_cols(const DenseMatrix& m, double tol) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  DenseMatrix w = m;
  const auto& k = simd::kernels();

  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double* wp = w.col(p).data();
        double* wq = w.col(q).data();
        const double alpha = k.dot(wp, wp, rows);
        const double beta = k.dot(wq, wq, rows);
        const double gamma = k.dot(wp, wq, rows);
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        double t = 1.0 / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        if (zeta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        k.rotate(wp, wq, rows, c, c * t);
      }
    }
    if (!rotated) break;
  }

  Vector sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) sigma[j] = std::sqrt(k.dot(w.col(j).data(), w.col(j).data(), rows));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });
  const double smax = cols > 0 ? sigma[order.front()] : 0.0;

  Orthonormalized out;
  std::vector<std::size_t> keep;
  if (smax > 0.0)
    for (std::size_t j : order)
      if (sigma[j] > tol * smax) keep.push_back(j);
  out.rank = keep.size();
  out.q = DenseMatrix(rows, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double inv = 1.0 / sigma[keep[c]];
    const auto src = w.col(keep[c]);
    auto dst = out.q.col(c);
    for (std::size_t i = 0; i < rows; ++i) dst[i] = src[i] * inv;
  }
  return out;
}

} // namespace pmsfem::linalg
