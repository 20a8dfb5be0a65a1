#pragma once

#include "pmsfem/mesher/coarse_grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace pmsfem::mesher {

enum class NodeMarker : std::uint8_t { Interior = 0, Outer = 1, Perforation = 2 };
enum class EdgeMarker : std::uint8_t { Outer = 1, Perforation = 2 };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  EdgeMarker marker = EdgeMarker::Outer;
  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

struct FineMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  ///< counter-clockwise
  std::vector<NodeMarker> node_markers;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> coarse_parent;             ///< per triangle

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;

  friend bool operator==(const FineMesh&, const FineMesh&) = default;
};

struct MeshOptions {
  double h_target = 0.03;      ///< longest admissible edge
  double min_angle_deg = 20.0;
  std::size_t max_vertices = 200000;
};

/// Constrained Delaunay triangulation of the perforated domain with coarse
/// edges and hole polygons as constraints, refined until every triangle meets
/// the angle and size bounds. Triangles wedged in a corner where two
/// constraint segments meet at less than 60 degrees (a coarse line crossing a
/// hole polygon) are exempt, since refinement cannot improve them.
/// Throws RefinementFailure.
FineMesh generate_fine_mesh(const PerforatedDomain& domain, const CoarseGrid& coarse, const MeshOptions& options);

/// Triangles across each edge (edge k is opposite vertex k); -1 on the boundary.
std::vector<std::array<int, 3>> triangle_neighbors(const FineMesh& mesh);

/// Smallest interior angle over all triangles, in degrees.
double mesh_min_angle_deg(const FineMesh& mesh);

} // namespace pmsfem::mesher
