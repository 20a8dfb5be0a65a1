#pragma once

// Hand-rolled generators for the property tests. Every generator takes the
// engine by reference so a test controls its own seed.

#include "pmsfem/fem/elements.hpp"
#include "pmsfem/linalg/dense.hpp"
#include "pmsfem/linalg/sparse.hpp"

#include <random>

namespace gen {

using Rng = std::mt19937_64;
using pmsfem::linalg::DenseMatrix;
using pmsfem::linalg::Vector;

inline double uniform(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Vector vector(Rng& rng, std::size_t n) {
  Vector v(n);
  for (auto& x : v) x = uniform(rng);
  return v;
}

inline DenseMatrix dense(Rng& rng, std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = uniform(rng);
  return m;
}

inline DenseMatrix symmetric(Rng& rng, std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) m(i, j) = m(j, i) = uniform(rng);
  return m;
}

/// BᵀB + shift·I.
inline DenseMatrix spd(Rng& rng, std::size_t n, double shift = 1.0) {
  const DenseMatrix b = dense(rng, n, n);
  DenseMatrix m = pmsfem::linalg::multiply_transposed(b, b);
  for (std::size_t i = 0; i < n; ++i) m(i, i) += shift;
  pmsfem::linalg::symmetrize(m);
  return m;
}

/// Random sparse SPD matrix: a 1-D Laplacian plus random symmetric couplings,
/// made diagonally dominant.
inline pmsfem::linalg::SparseSym sparse_spd(Rng& rng, int n, int extra) {
  std::vector<pmsfem::linalg::Triplet> t;
  std::vector<double> diag(static_cast<std::size_t>(n), 1.0);
  const auto couple = [&](int i, int j, double v) {
    t.push_back({i, j, v});
    diag[static_cast<std::size_t>(i)] += std::abs(v);
    diag[static_cast<std::size_t>(j)] += std::abs(v);
  };
  for (int i = 0; i + 1 < n; ++i) couple(i, i + 1, -1.0);
  for (int k = 0; k < extra; ++k) {
    const int i = uniform_int(rng, 0, n - 1), j = uniform_int(rng, 0, n - 1);
    if (i != j) couple(std::min(i, j), std::max(i, j), uniform(rng));
  }
  for (int i = 0; i < n; ++i) t.push_back({i, i, diag[static_cast<std::size_t>(i)]});
  return pmsfem::linalg::SparseSym::from_triplets(n, t);
}

/// Counter-clockwise triangle in [-1, 2]² with every angle at least `min_angle_deg`.
inline pmsfem::fem::Triangle triangle(Rng& rng, double min_angle_deg = 5.0) {
  for (;;) {
    pmsfem::fem::Triangle t{{{uniform(rng, -1, 2), uniform(rng, -1, 2)},
                             {uniform(rng, -1, 2), uniform(rng, -1, 2)},
                             {uniform(rng, -1, 2), uniform(rng, -1, 2)}}};
    if (pmsfem::mesher::orient(t[0], t[1], t[2]) < 0) std::swap(t[1], t[2]);
    if (pmsfem::mesher::min_angle_deg(t[0], t[1], t[2]) >= min_angle_deg) return t;
  }
}

} // namespace gen
