#include "pmsfem/fem/space.hpp"

#include <algorithm>

namespace pmsfem::fem {

int FeSpace::edge_node(int a, int b) const {
  const auto it = edge_nodes.find({std::min(a, b), std::max(a, b)});
  return it == edge_nodes.end() ? -1 : it->second;
}

FeSpace make_space(const mesher::FineMesh& mesh, ElementKind kind, int components) {
  FeSpace s;
  s.kind = kind;
  s.components = components;
  s.num_vertices = mesh.nodes.size();
  s.node_coords = mesh.nodes;
  s.node_markers = mesh.node_markers;
  s.cell_nodes.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto& cell = s.cell_nodes[t];
    cell.fill(-1);
    for (std::size_t k = 0; k < 3; ++k) cell[k] = mesh.triangles[t][k];
  }
  if (kind == ElementKind::P1) return s;

  std::map<std::pair<int, int>, mesher::EdgeMarker> boundary;
  for (const auto& e : mesh.boundary_edges) boundary[{std::min(e.a, e.b), std::max(e.a, e.b)}] = e.marker;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (std::size_t e = 0; e < 3; ++e) {
      const int a = mesh.triangles[t][e], b = mesh.triangles[t][(e + 1) % 3];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = s.edge_nodes.try_emplace(key, static_cast<int>(s.node_coords.size()));
      if (inserted) {
        const mesher::Vec2 pa = mesh.nodes[static_cast<std::size_t>(a)], pb = mesh.nodes[static_cast<std::size_t>(b)];
        s.node_coords.push_back(0.5 * (pa + pb));
        const auto bit = boundary.find(key);
        mesher::NodeMarker marker = mesher::NodeMarker::Interior;
        if (bit != boundary.end())
          marker = bit->second == mesher::EdgeMarker::Outer ? mesher::NodeMarker::Outer : mesher::NodeMarker::Perforation;
        s.node_markers.push_back(marker);
      }
      s.cell_nodes[t][3 + e] = it->second;
    }
  return s;
}

} // namespace pmsfem::fem
