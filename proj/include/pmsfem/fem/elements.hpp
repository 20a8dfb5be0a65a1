#pragma once

#include "pmsfem/mesher/geometry.hpp"

#include <array>
#include <cstddef>

namespace pmsfem::fem {

using mesher::Vec2;
using Triangle = std::array<Vec2, 3>;

/// Small row-major dense matrix for element contributions.
template <std::size_t R, std::size_t C>
struct SmallMatrix {
  std::array<double, R * C> a{};
  double& operator()(std::size_t i, std::size_t j) { return a[i * C + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * C + j]; }
  static constexpr std::size_t rows = R;
  static constexpr std::size_t cols = C;
};

struct Lame {
  double mu = 0.0;
  double lambda = 0.0;
  static Lame from_young(double E, double nu) {
    return {E / (2.0 * (1.0 + nu)), E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))};
  }
};

/// Signed area; throws DegenerateTriangle unless it is positive.
double checked_area(const Triangle& t);

/// Gradients of the barycentric coordinates (constant on the triangle).
std::array<Vec2, 3> barycentric_gradients(const Triangle& t);

/// ∫ λ0^a λ1^b λ2^c over the triangle.
double barycentric_monomial(double area, int a, int b, int c);

/// P1 ∫ ∇φ_a·∇φ_b.
SmallMatrix<3, 3> element_laplace(const Triangle& t);
/// P1 ∫ φ_a φ_b.
SmallMatrix<3, 3> element_mass(const Triangle& t);
/// P1 plane-strain ∫ 2μ ε(φ_a):ε(φ_b) + λ div φ_a div φ_b; local DOF 2·node + component.
SmallMatrix<6, 6> element_elasticity(const Triangle& t, const Lame& lame);

/// P2 nodes: 0-2 vertices, 3 = edge(0,1), 4 = edge(1,2), 5 = edge(2,0).
SmallMatrix<6, 6> element_p2_laplace(const Triangle& t);
SmallMatrix<6, 6> element_p2_mass(const Triangle& t);

struct StokesElement {
  /// Vector Laplacian ∫ ∇φ_a:∇φ_b for P2 velocity; local DOF 2·node + component.
  SmallMatrix<12, 12> velocity;
  /// ∫ q_i div φ_j with P1 pressure q_i and P2 velocity φ_j.
  SmallMatrix<3, 12> divergence;
};
StokesElement element_stokes(const Triangle& t);

/// Values of the six P2 basis functions at barycentric coordinates (l0, l1, l2).
std::array<double, 6> p2_values(double l0, double l1, double l2);

} // namespace pmsfem::fem
