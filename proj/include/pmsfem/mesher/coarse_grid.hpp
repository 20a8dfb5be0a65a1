#pragma once

#include "pmsfem/mesher/domain.hpp"

#include <array>
#include <vector>

namespace pmsfem::mesher {

/// Uniform triangulation of the bbox: every lattice cell is split along the
/// diagonal from its lower-left to its upper-right corner.
struct CoarseGrid {
  Rect bbox;
  double H = 0.0;
  int nx = 0;
  int ny = 0;
  std::vector<Vec2> nodes;                     ///< index j * (nx + 1) + i
  std::vector<std::array<int, 3>> triangles;   ///< counter-clockwise

  int node_index(int i, int j) const { return j * (nx + 1) + i; }
  /// Coarse triangle containing p (points on shared edges resolve to one side).
  int locate(Vec2 p) const;
  /// Coarse triangles having `node` as a vertex.
  std::vector<int> triangles_around(int node) const;
};

/// Throws NonDivisibleH unless the bbox sides are integer multiples of H.
CoarseGrid build_coarse_grid(const PerforatedDomain& domain, double H);

/// Value at p of the piecewise linear hat function of coarse node `node`.
double coarse_hat(const CoarseGrid& grid, int node, Vec2 p);

} // namespace pmsfem::mesher
