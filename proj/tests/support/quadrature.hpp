#pragma once

// Independent quadrature oracle: a tensor Gauss-Legendre rule on the unit
// square collapsed onto the reference triangle (Duffy map). With five points
// per direction it integrates polynomials of degree 8 on the triangle exactly.

#include "pmsfem/fem/elements.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <functional>

namespace oracle {

using pmsfem::fem::Triangle;
using pmsfem::mesher::Vec2;

struct Point {
  double xi, eta, weight;  ///< reference coordinates, weight includes the Duffy Jacobian
};

/// Gauss-Legendre nodes from Newton iteration on P5, mapped to [0, 1].
inline std::vector<Point> rule() {
  static const std::vector<Point> pts = [] {
    std::array<double, 5> x{}, w{};
    for (int k = 0; k < 5; ++k) {
      double t = std::cos(std::numbers::pi * (k + 0.75) / 5.5);
      double dp = 1.0;
      for (int it = 0; it < 50; ++it) {
        double p0 = 1.0, p1 = t;
        for (int n = 2; n <= 5; ++n) {
          const double p2 = ((2.0 * n - 1.0) * t * p1 - (n - 1.0) * p0) / n;
          p0 = p1;
          p1 = p2;
        }
        dp = 5.0 * (t * p1 - p0) / (t * t - 1.0);
        t -= p1 / dp;
      }
      x[static_cast<std::size_t>(k)] = 0.5 * (1.0 - t);
      w[static_cast<std::size_t>(k)] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    std::vector<Point> out;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) out.push_back({x[i] * (1.0 - x[j]), x[j], w[i] * w[j] * (1.0 - x[j])});
    return out;
  }();
  return pts;
}

/// Affine map from the reference triangle and its inverse transpose.
struct AffineMap {
  Vec2 origin;
  double j[2][2];      ///< columns v1 - v0, v2 - v0
  double det;
  double jit[2][2];    ///< J^{-T}

  explicit AffineMap(const Triangle& t) : origin(t[0]) {
    j[0][0] = t[1].x - t[0].x; j[0][1] = t[2].x - t[0].x;
    j[1][0] = t[1].y - t[0].y; j[1][1] = t[2].y - t[0].y;
    det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    jit[0][0] = j[1][1] / det;  jit[0][1] = -j[1][0] / det;
    jit[1][0] = -j[0][1] / det; jit[1][1] = j[0][0] / det;
  }
  Vec2 grad(double gxi, double geta) const {
    return {jit[0][0] * gxi + jit[0][1] * geta, jit[1][0] * gxi + jit[1][1] * geta};
  }
};

/// P1 shape value and reference gradient.
inline double p1(int a, double xi, double eta) { return a == 0 ? 1.0 - xi - eta : (a == 1 ? xi : eta); }
inline Vec2 p1_ref_grad(int a) { return a == 0 ? Vec2{-1, -1} : (a == 1 ? Vec2{1, 0} : Vec2{0, 1}); }

/// P2 shapes: vertices then edges (0,1), (1,2), (2,0).
inline double p2(int a, double xi, double eta) {
  const double l[3] = {1.0 - xi - eta, xi, eta};
  if (a < 3) return l[a] * (2.0 * l[a] - 1.0);
  const int e0 = a - 3, e1 = (a - 2) % 3;
  return 4.0 * l[e0] * l[e1];
}
inline Vec2 p2_ref_grad(int a, double xi, double eta) {
  const double l[3] = {1.0 - xi - eta, xi, eta};
  const Vec2 g[3] = {{-1, -1}, {1, 0}, {0, 1}};
  if (a < 3) return (4.0 * l[a] - 1.0) * g[a];
  const int e0 = a - 3, e1 = (a - 2) % 3;
  return 4.0 * (l[e1] * g[e0] + l[e0] * g[e1]);
}

/// ∫_T f over the physical triangle, f given in reference coordinates.
inline double integrate(const Triangle& t, const std::function<double(double, double)>& f) {
  const AffineMap map(t);
  double s = 0.0;
  for (const auto& p : rule()) s += p.weight * f(p.xi, p.eta);
  return s * std::abs(map.det);
}

} // namespace oracle
