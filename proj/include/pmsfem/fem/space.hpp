#pragma once

#include "pmsfem/mesher/fine_mesh.hpp"

#include <array>
#include <map>
#include <vector>

namespace pmsfem::fem {

enum class ElementKind { P1, P2 };

/// Nodal Lagrange space on a fine mesh. P2 adds one node per mesh edge after
/// the vertices. DOF numbering is interleaved: node * components + component.
struct FeSpace {
  ElementKind kind = ElementKind::P1;
  int components = 1;
  std::size_t num_vertices = 0;
  std::vector<mesher::Vec2> node_coords;
  std::vector<mesher::NodeMarker> node_markers;
  std::vector<std::array<int, 6>> cell_nodes;  ///< P1 uses the first three entries
  std::map<std::pair<int, int>, int> edge_nodes;  ///< sorted vertex pair -> P2 edge node

  int nodes_per_cell() const { return kind == ElementKind::P1 ? 3 : 6; }
  std::size_t num_nodes() const { return node_coords.size(); }
  std::size_t num_dofs() const { return node_coords.size() * static_cast<std::size_t>(components); }
  int dof(int node, int component) const { return node * components + component; }
  /// P2 node on the edge a-b, or -1.
  int edge_node(int a, int b) const;
};

FeSpace make_space(const mesher::FineMesh& mesh, ElementKind kind, int components);

} // namespace pmsfem::fem
