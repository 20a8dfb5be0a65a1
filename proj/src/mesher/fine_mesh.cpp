#include "pmsfem/mesher/fine_mesh.hpp"

#include "pmsfem/error.hpp"
#include "triangulation.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace pmsfem::mesher {
namespace {

constexpr double kDegenerate = 1e-9;

struct Hole {
  Circle circle;
  std::vector<Vec2> polygon;
};

bool inside_any(const std::vector<Hole>& holes, Vec2 p) {
  for (const Hole& h : holes)
    if (distance(p, h.circle.center) < h.circle.radius && point_in_polygon(p, h.polygon)) return true;
  return false;
}

std::vector<std::array<int, 2>> coarse_edges(const CoarseGrid& g) {
  std::vector<std::array<int, 2>> edges;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      if (i < g.nx) edges.push_back({g.node_index(i, j), g.node_index(i + 1, j)});
      if (j < g.ny) edges.push_back({g.node_index(i, j), g.node_index(i, j + 1)});
      if (i < g.nx && j < g.ny) edges.push_back({g.node_index(i, j), g.node_index(i + 1, j + 1)});
    }
  return edges;
}

void check_degeneracies(const CoarseGrid& g, const std::vector<std::array<int, 2>>& edges, const std::vector<Hole>& holes) {
  const double tol = kDegenerate * std::max(g.bbox.width(), g.bbox.height());
  for (std::size_t h = 0; h < holes.size(); ++h) {
    const Hole& hole = holes[h];
    for (const auto& e : edges) {
      const Vec2 a = g.nodes[static_cast<std::size_t>(e[0])], b = g.nodes[static_cast<std::size_t>(e[1])];
      const double d = point_segment_distance(hole.circle.center, a, b);
      if (std::abs(d - hole.circle.radius) < tol)
        throw Error(ErrorCode::RefinementFailure, "inclusion " + std::to_string(h) + " is tangent to a coarse edge");
      for (const Vec2& p : hole.polygon)
        if (point_segment_distance(p, a, b) < tol)
          throw Error(ErrorCode::RefinementFailure, "a vertex of inclusion " + std::to_string(h) + " lies on a coarse edge");
    }
    const std::size_t m = hole.polygon.size();
    for (const Vec2& node : g.nodes)
      for (std::size_t k = 0; k < m; ++k)
        if (point_segment_distance(node, hole.polygon[k], hole.polygon[(k + 1) % m]) < tol)
          throw Error(ErrorCode::RefinementFailure, "a coarse node lies on the boundary of inclusion " + std::to_string(h));
  }
}

} // namespace

double FineMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return signed_area(nodes[static_cast<std::size_t>(tri[0])], nodes[static_cast<std::size_t>(tri[1])],
                     nodes[static_cast<std::size_t>(tri[2])]);
}

FineMesh generate_fine_mesh(const PerforatedDomain& domain, const CoarseGrid& coarse, const MeshOptions& options) {
  if (!(options.h_target > 0.0) || !(options.h_target < coarse.H))
    throw Error(ErrorCode::InvalidConfig, "h_target must lie in (0, H)");
  if (!(options.min_angle_deg > 0.0) || options.min_angle_deg > 30.0)
    throw Error(ErrorCode::InvalidConfig, "min_angle must lie in (0, 30] degrees");

  std::vector<Hole> holes;
  for (std::size_t i = 0; i < domain.inclusions.size(); ++i) holes.push_back({domain.inclusions[i], domain.polygon(i)});
  const auto edges = coarse_edges(coarse);
  check_degeneracies(coarse, edges, holes);

  detail::Triangulator tri(domain.bbox);

  std::vector<int> node_id(coarse.nodes.size(), -1);
  for (std::size_t n = 0; n < coarse.nodes.size(); ++n)
    if (!inside_any(holes, coarse.nodes[n])) node_id[n] = tri.insert_input_vertex(coarse.nodes[n]);
  std::vector<std::vector<int>> poly_id(holes.size());
  for (std::size_t h = 0; h < holes.size(); ++h)
    for (const Vec2& p : holes[h].polygon) poly_id[h].push_back(tri.insert_input_vertex(p));

  // Crossings between coarse edges and hole polygons split both.
  struct Crossing {
    double s;  ///< parameter along the coarse edge
    double u;  ///< parameter along the polygon edge
    int vertex;
  };
  std::vector<std::vector<Crossing>> on_coarse(edges.size());
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Crossing>> on_polygon;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Vec2 a = coarse.nodes[static_cast<std::size_t>(edges[e][0])];
    const Vec2 b = coarse.nodes[static_cast<std::size_t>(edges[e][1])];
    for (std::size_t h = 0; h < holes.size(); ++h) {
      const Hole& hole = holes[h];
      if (point_segment_distance(hole.circle.center, a, b) >= hole.circle.radius) continue;
      const std::size_t m = hole.polygon.size();
      for (std::size_t k = 0; k < m; ++k) {
        const Vec2 p = hole.polygon[k], q = hole.polygon[(k + 1) % m];
        const double d = cross(b - a, q - p);
        if (d == 0.0) continue;
        const double s = cross(p - a, q - p) / d;
        const double u = cross(p - a, b - a) / d;
        if (!(s > 0.0 && s < 1.0 && u > 0.0 && u < 1.0)) continue;
        const int v = tri.insert_input_vertex(a + s * (b - a));
        on_coarse[e].push_back({s, u, v});
        on_polygon[{h, k}].push_back({s, u, v});
      }
    }
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto& xs = on_coarse[e];
    std::sort(xs.begin(), xs.end(), [](const Crossing& l, const Crossing& r) { return l.s < r.s; });
    const Vec2 a = coarse.nodes[static_cast<std::size_t>(edges[e][0])];
    const Vec2 b = coarse.nodes[static_cast<std::size_t>(edges[e][1])];
    std::vector<std::pair<double, int>> stops{{0.0, node_id[static_cast<std::size_t>(edges[e][0])]}};
    for (const Crossing& x : xs) stops.emplace_back(x.s, x.vertex);
    stops.emplace_back(1.0, node_id[static_cast<std::size_t>(edges[e][1])]);
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
      const double mid = 0.5 * (stops[k].first + stops[k + 1].first);
      if (inside_any(holes, a + mid * (b - a))) continue;
      tri.recover_segment(stops[k].second, stops[k + 1].second);
    }
  }
  for (std::size_t h = 0; h < holes.size(); ++h) {
    const std::size_t m = holes[h].polygon.size();
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<int> chain{poly_id[h][k]};
      auto it = on_polygon.find({h, k});
      if (it != on_polygon.end()) {
        auto xs = it->second;
        std::sort(xs.begin(), xs.end(), [](const Crossing& l, const Crossing& r) { return l.u < r.u; });
        for (const Crossing& x : xs) chain.push_back(x.vertex);
      }
      chain.push_back(poly_id[h][(k + 1) % m]);
      for (std::size_t c = 0; c + 1 < chain.size(); ++c) tri.recover_segment(chain[c], chain[c + 1]);
    }
  }

  tri.mark_holes([&](Vec2 p) { return inside_any(holes, p); });
  tri.refine(options.h_target, options.min_angle_deg, options.max_vertices);

  // Keep domain triangles and the vertices they use, in creation order.
  const auto& verts = tri.vertices();
  const auto& tris = tri.triangles();
  std::vector<int> remap(verts.size(), -1);
  for (const auto& T : tris)
    if (T.region == 0)
      for (int v : T.v) remap[static_cast<std::size_t>(v)] = 0;
  FineMesh mesh;
  for (std::size_t v = 0; v < verts.size(); ++v)
    if (remap[v] == 0) {
      remap[v] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(verts[v]);
    }
  mesh.node_markers.assign(mesh.nodes.size(), NodeMarker::Interior);
  for (const auto& T : tris) {
    if (T.region != 0) continue;
    const std::array<int, 3> local{remap[static_cast<std::size_t>(T.v[0])], remap[static_cast<std::size_t>(T.v[1])],
                                   remap[static_cast<std::size_t>(T.v[2])]};
    mesh.triangles.push_back(local);
    const Vec2 g = (1.0 / 3.0) * (verts[static_cast<std::size_t>(T.v[0])] + verts[static_cast<std::size_t>(T.v[1])] +
                                  verts[static_cast<std::size_t>(T.v[2])]);
    mesh.coarse_parent.push_back(coarse.locate(g));
    for (std::size_t i = 0; i < 3; ++i) {
      const int nb = T.n[i];
      if (nb >= 0 && tris[static_cast<std::size_t>(nb)].region == 0) continue;
      const EdgeMarker marker = nb < 0 ? EdgeMarker::Outer : EdgeMarker::Perforation;
      const int a = local[(i + 1) % 3], b = local[(i + 2) % 3];
      mesh.boundary_edges.push_back({a, b, marker});
      const NodeMarker nm = marker == EdgeMarker::Outer ? NodeMarker::Outer : NodeMarker::Perforation;
      mesh.node_markers[static_cast<std::size_t>(a)] = nm;
      mesh.node_markers[static_cast<std::size_t>(b)] = nm;
    }
  }
  return mesh;
}

std::vector<std::array<int, 3>> triangle_neighbors(const FineMesh& mesh) {
  std::vector<std::array<int, 3>> nb(mesh.triangles.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, std::pair<int, int>> open;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      int a = mesh.triangles[t][static_cast<std::size_t>((k + 1) % 3)];
      int b = mesh.triangles[t][static_cast<std::size_t>((k + 2) % 3)];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = open.try_emplace({a, b}, static_cast<int>(t), k);
      if (!inserted) {
        const auto [s, j] = it->second;
        nb[t][static_cast<std::size_t>(k)] = s;
        nb[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = static_cast<int>(t);
      }
    }
  return nb;
}

double mesh_min_angle_deg(const FineMesh& mesh) {
  double m = 180.0;
  for (const auto& t : mesh.triangles)
    m = std::min(m, min_angle_deg(mesh.nodes[static_cast<std::size_t>(t[0])], mesh.nodes[static_cast<std::size_t>(t[1])],
                                  mesh.nodes[static_cast<std::size_t>(t[2])]));
  return m;
}

} // namespace pmsfem::mesher
