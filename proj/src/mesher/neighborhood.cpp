#include "pmsfem/mesher/neighborhood.hpp"

#include "pmsfem/error.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace pmsfem::mesher {
namespace {

void fill_from_elements(Neighborhood& nb, const FineMesh& fine) {
  std::map<std::pair<int, int>, int> edge_count;
  std::vector<int> nodes;
  for (int t : nb.elements) {
    const auto& tri = fine.triangles[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      nodes.push_back(tri[static_cast<std::size_t>(k)]);
      const int a = tri[static_cast<std::size_t>((k + 1) % 3)], b = tri[static_cast<std::size_t>((k + 2) % 3)];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  nb.nodes = std::move(nodes);

  std::map<std::pair<int, int>, EdgeMarker> marked;
  for (const auto& e : fine.boundary_edges) marked[{std::min(e.a, e.b), std::max(e.a, e.b)}] = e.marker;

  nb.perforation_nodes.clear();
  for (int v : nb.nodes)
    if (fine.node_markers[static_cast<std::size_t>(v)] == NodeMarker::Perforation) nb.perforation_nodes.push_back(v);

  std::vector<int> boundary;
  nb.boundary_edges.clear();
  for (const auto& [e, count] : edge_count) {
    if (count != 1) continue;
    const auto it = marked.find(e);
    if (it != marked.end() && it->second == EdgeMarker::Perforation) continue;
    nb.boundary_edges.push_back({e.first, e.second});
    for (int v : {e.first, e.second})
      if (fine.node_markers[static_cast<std::size_t>(v)] != NodeMarker::Perforation) boundary.push_back(v);
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  nb.boundary_nodes = std::move(boundary);
}

} // namespace

Neighborhood build_neighborhood(const CoarseGrid& coarse, const FineMesh& fine, int coarse_node) {
  if (coarse_node < 0 || coarse_node >= static_cast<int>(coarse.nodes.size()))
    throw Error(ErrorCode::IndexOutOfRange, "coarse node " + std::to_string(coarse_node) + " does not exist");
  const auto around = coarse.triangles_around(coarse_node);
  Neighborhood nb;
  nb.coarse_node = coarse_node;
  for (std::size_t t = 0; t < fine.triangles.size(); ++t)
    if (std::find(around.begin(), around.end(), fine.coarse_parent[t]) != around.end()) nb.elements.push_back(static_cast<int>(t));
  nb.core_elements = nb.elements;
  fill_from_elements(nb, fine);
  return nb;
}

Neighborhood oversample(const Neighborhood& base, const FineMesh& fine, int t) {
  if (t <= 0) return base;
  std::vector<std::vector<int>> node_triangles(fine.nodes.size());
  for (std::size_t e = 0; e < fine.triangles.size(); ++e)
    for (int v : fine.triangles[e]) node_triangles[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));
  std::vector<char> in(fine.triangles.size(), 0);
  for (int e : base.elements) in[static_cast<std::size_t>(e)] = 1;
  std::vector<int> frontier = base.elements;
  // One layer is the ring of every triangle sharing a vertex with the region.
  for (int layer = 0; layer < t; ++layer) {
    std::vector<int> next;
    for (int e : frontier)
      for (int v : fine.triangles[static_cast<std::size_t>(e)])
        for (int n : node_triangles[static_cast<std::size_t>(v)])
          if (!in[static_cast<std::size_t>(n)]) {
            in[static_cast<std::size_t>(n)] = 1;
            next.push_back(n);
          }
    frontier = std::move(next);
  }
  Neighborhood nb;
  nb.coarse_node = base.coarse_node;
  nb.layers = base.layers + t;
  nb.core_elements = base.core_elements;
  for (std::size_t e = 0; e < in.size(); ++e)
    if (in[e]) nb.elements.push_back(static_cast<int>(e));
  fill_from_elements(nb, fine);
  return nb;
}

} // namespace pmsfem::mesher
