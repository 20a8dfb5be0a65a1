#include "pmsfem/fem/elements.hpp"

#include "pmsfem/error.hpp"

#include <algorithm>
#include <cmath>

namespace pmsfem::fem {
namespace {

constexpr std::array<std::array<int, 2>, 3> kP2Edges{{{0, 1}, {1, 2}, {2, 0}}};

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// ∫ λ_m λ_n.
double p1_pair(double area, std::size_t m, std::size_t n) { return area * (m == n ? 2.0 : 1.0) / 12.0; }

/// ∇φ_a = Σ_m λ_m G[a][m] for the P2 basis.
std::array<std::array<Vec2, 3>, 6> p2_gradient_coefficients(const std::array<Vec2, 3>& g) {
  std::array<std::array<Vec2, 3>, 6> G{};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < 3; ++m) G[k][m] = (m == k ? 3.0 : -1.0) * g[k];
  for (std::size_t e = 0; e < 3; ++e) {
    const auto i = static_cast<std::size_t>(kP2Edges[e][0]);
    const auto j = static_cast<std::size_t>(kP2Edges[e][1]);
    G[3 + e][i] = 4.0 * g[j];
    G[3 + e][j] = 4.0 * g[i];
  }
  return G;
}

/// φ_a = λᵀ Q[a] λ for the P2 basis.
std::array<std::array<std::array<double, 3>, 3>, 6> p2_quadratic_forms() {
  std::array<std::array<std::array<double, 3>, 3>, 6> Q{};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < 3; ++m) {
      if (m == k) {
        Q[k][k][k] = 1.0;
      } else {
        Q[k][k][m] = -0.5;
        Q[k][m][k] = -0.5;
      }
    }
  for (std::size_t e = 0; e < 3; ++e) {
    const auto i = static_cast<std::size_t>(kP2Edges[e][0]);
    const auto j = static_cast<std::size_t>(kP2Edges[e][1]);
    Q[3 + e][i][j] = 2.0;
    Q[3 + e][j][i] = 2.0;
  }
  return Q;
}

} // namespace

double checked_area(const Triangle& t) {
  const double area = signed_area(t[0], t[1], t[2]);
  const double scale = std::max({dot(t[1] - t[0], t[1] - t[0]), dot(t[2] - t[1], t[2] - t[1]), dot(t[0] - t[2], t[0] - t[2])});
  if (!(area > 1e-14 * scale)) throw Error(ErrorCode::DegenerateTriangle, "triangle has nonpositive or negligible area");
  return area;
}

std::array<Vec2, 3> barycentric_gradients(const Triangle& t) {
  const double twice = 2.0 * checked_area(t);
  std::array<Vec2, 3> g{};
  for (std::size_t k = 0; k < 3; ++k) {
    const Vec2 b = t[(k + 1) % 3], c = t[(k + 2) % 3];
    g[k] = {(b.y - c.y) / twice, (c.x - b.x) / twice};
  }
  return g;
}

double barycentric_monomial(double area, int a, int b, int c) {
  return 2.0 * area * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

SmallMatrix<3, 3> element_laplace(const Triangle& t) {
  const double area = checked_area(t);
  const auto g = barycentric_gradients(t);
  SmallMatrix<3, 3> k;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) k(a, b) = area * dot(g[a], g[b]);
  return k;
}

SmallMatrix<3, 3> element_mass(const Triangle& t) {
  const double area = checked_area(t);
  SmallMatrix<3, 3> m;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) m(a, b) = p1_pair(area, a, b);
  return m;
}

SmallMatrix<6, 6> element_elasticity(const Triangle& t, const Lame& lame) {
  const double area = checked_area(t);
  const auto g = barycentric_gradients(t);
  // Symmetric gradient of the basis function (node k, component c).
  const auto strain = [&](std::size_t dof) {
    const std::size_t k = dof / 2, c = dof % 2;
    std::array<std::array<double, 2>, 2> grad{};
    grad[c][0] = g[k].x;
    grad[c][1] = g[k].y;
    std::array<std::array<double, 2>, 2> eps{};
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) eps[i][j] = 0.5 * (grad[i][j] + grad[j][i]);
    return eps;
  };
  SmallMatrix<6, 6> k;
  for (std::size_t a = 0; a < 6; ++a) {
    const auto ea = strain(a);
    for (std::size_t b = 0; b < 6; ++b) {
      const auto eb = strain(b);
      double contraction = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) contraction += ea[i][j] * eb[i][j];
      const double div_a = ea[0][0] + ea[1][1];
      const double div_b = eb[0][0] + eb[1][1];
      k(a, b) = area * (2.0 * lame.mu * contraction + lame.lambda * div_a * div_b);
    }
  }
  return k;
}

SmallMatrix<6, 6> element_p2_laplace(const Triangle& t) {
  const double area = checked_area(t);
  const auto G = p2_gradient_coefficients(barycentric_gradients(t));
  SmallMatrix<6, 6> k;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a; b < 6; ++b) {
      double s = 0.0;
      for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t n = 0; n < 3; ++n) s += p1_pair(area, m, n) * dot(G[a][m], G[b][n]);
      k(a, b) = s;
      k(b, a) = s;
    }
  return k;
}

SmallMatrix<6, 6> element_p2_mass(const Triangle& t) {
  const double area = checked_area(t);
  const auto Q = p2_quadratic_forms();
  // Quartic moments ∫ λ_m λ_n λ_p λ_q indexed by exponent counts.
  std::array<double, 81> quartic{};
  for (std::size_t idx = 0; idx < 81; ++idx) {
    int e[3] = {0, 0, 0};
    std::size_t r = idx;
    for (int f = 0; f < 4; ++f) {
      ++e[r % 3];
      r /= 3;
    }
    quartic[idx] = barycentric_monomial(area, e[0], e[1], e[2]);
  }
  SmallMatrix<6, 6> mm;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a; b < 6; ++b) {
      double s = 0.0;
      for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t n = 0; n < 3; ++n) {
          if (Q[a][m][n] == 0.0) continue;
          for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t q = 0; q < 3; ++q) {
              if (Q[b][p][q] == 0.0) continue;
              s += Q[a][m][n] * Q[b][p][q] * quartic[m + 3 * n + 9 * p + 27 * q];
            }
        }
      mm(a, b) = s;
      mm(b, a) = s;
    }
  return mm;
}

StokesElement element_stokes(const Triangle& t) {
  const double area = checked_area(t);
  const auto lap = element_p2_laplace(t);
  const auto G = p2_gradient_coefficients(barycentric_gradients(t));
  StokesElement el;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b)
      for (std::size_t c = 0; c < 2; ++c) el.velocity(2 * a + c, 2 * b + c) = lap(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t a = 0; a < 6; ++a) {
      double dx = 0.0, dy = 0.0;
      for (std::size_t m = 0; m < 3; ++m) {
        dx += p1_pair(area, i, m) * G[a][m].x;
        dy += p1_pair(area, i, m) * G[a][m].y;
      }
      el.divergence(i, 2 * a) = dx;
      el.divergence(i, 2 * a + 1) = dy;
    }
  return el;
}

std::array<double, 6> p2_values(double l0, double l1, double l2) {
  return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0), 4.0 * l0 * l1, 4.0 * l1 * l2, 4.0 * l2 * l0};
}

} // namespace pmsfem::fem
