#include "pmsfem/error.hpp"
#include "pmsfem/harness/presets.hpp"
#include "pmsfem/mesher/mesh_io.hpp"
#include "pmsfem/mesher/neighborhood.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace pmsfem;
using namespace pmsfem::mesher;

namespace {

const Rect kUnit{{0, 0}, {1, 1}};

FineMesh mesh_for(const PerforatedDomain& d, double H, double h) {
  MeshOptions o;
  o.h_target = h;
  return generate_fine_mesh(d, build_coarse_grid(d, H), o);
}

std::map<std::pair<int, int>, int> edge_counts(const FineMesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  return count;
}

bool inside_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double tol) {
  const double scale = std::abs(orient(a, b, c));
  return orient(a, b, p) >= -tol * scale && orient(b, c, p) >= -tol * scale && orient(c, a, p) >= -tol * scale;
}

/// Conformity, coverage, quality and coarse conformity of a generated mesh.
void check_mesh_invariants(const PerforatedDomain& d, const CoarseGrid& g, const FineMesh& m, double min_angle) {
  // Every edge has one or two triangles; single ones are exactly the marked boundary edges.
  std::set<std::pair<int, int>> marked;
  for (const auto& e : m.boundary_edges) marked.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
  std::size_t single = 0;
  for (const auto& [e, c] : edge_counts(m)) {
    CHECK((c == 1 || c == 2));
    if (c == 1) {
      ++single;
      CHECK(marked.count(e) == 1);
    }
  }
  CHECK(single == marked.size());

  double area = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const double a = m.triangle_area(t);
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(std::abs(area - d.area()) <= 1e-10 * d.area());
  // Angle bound, except at corners between two constraints: a coarse node, or
  // a hole vertex sitting on a coarse line.
  const auto on_coarse_line = [&](Vec2 p) {
    const auto near_multiple = [&](double v) { return std::abs(v / g.H - std::round(v / g.H)) < 1e-9; };
    return near_multiple(p.x) || near_multiple(p.y) || near_multiple(p.y - p.x);
  };
  const auto constraint_corner = [&](int v) {
    const Vec2 p = m.nodes[static_cast<std::size_t>(v)];
    for (const Vec2& c : g.nodes)
      if (distance(c, p) < 1e-12) return true;
    return m.node_markers[static_cast<std::size_t>(v)] == NodeMarker::Perforation && on_coarse_line(p);
  };
  for (const auto& t : m.triangles) {
    const double a = min_angle_deg(m.nodes[static_cast<std::size_t>(t[0])], m.nodes[static_cast<std::size_t>(t[1])],
                                   m.nodes[static_cast<std::size_t>(t[2])]);
    if (a < min_angle - 1e-9) CHECK((constraint_corner(t[0]) || constraint_corner(t[1]) || constraint_corner(t[2])));
  }

  // Each fine triangle lies inside its coarse parent, so no fine edge crosses a coarse edge.
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& ct = g.triangles[static_cast<std::size_t>(m.coarse_parent[t])];
    for (int v : m.triangles[t])
      CHECK(inside_triangle(m.nodes[static_cast<std::size_t>(v)], g.nodes[static_cast<std::size_t>(ct[0])],
                            g.nodes[static_cast<std::size_t>(ct[1])], g.nodes[static_cast<std::size_t>(ct[2])], 1e-9));
  }
  // No triangle inside a hole.
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 c = (1.0 / 3.0) * (m.nodes[static_cast<std::size_t>(tri[0])] + m.nodes[static_cast<std::size_t>(tri[1])] +
                                  m.nodes[static_cast<std::size_t>(tri[2])]);
    for (std::size_t h = 0; h < d.inclusions.size(); ++h) CHECK_FALSE(point_in_polygon(c, d.polygon(h)));
  }
}

} // namespace

TEST_CASE("coarse grid counts") {
  const auto d = build_domain(kUnit, {}, 16);
  const auto g5 = build_coarse_grid(d, 0.2);
  CHECK(g5.triangles.size() == 50);
  CHECK(g5.nodes.size() == 36);
  const auto g1 = build_coarse_grid(d, 1.0);
  CHECK(g1.triangles.size() == 2);
  CHECK(g1.nodes.size() == 4);
  const auto g3 = build_coarse_grid(d, 1.0 / 3.0);
  CHECK(g3.triangles.size() == 18);
  CHECK(g3.nodes.size() == 16);
  CHECK_THROWS_AS(build_coarse_grid(d, 0.3), Error);

  for (std::size_t t = 0; t < g5.triangles.size(); ++t) {
    const auto& tri = g5.triangles[t];
    CHECK(orient(g5.nodes[static_cast<std::size_t>(tri[0])], g5.nodes[static_cast<std::size_t>(tri[1])],
                 g5.nodes[static_cast<std::size_t>(tri[2])]) > 0.0);
    const Vec2 c = (1.0 / 3.0) * (g5.nodes[static_cast<std::size_t>(tri[0])] + g5.nodes[static_cast<std::size_t>(tri[1])] +
                                  g5.nodes[static_cast<std::size_t>(tri[2])]);
    CHECK(g5.locate(c) == static_cast<int>(t));
  }
  // Hat functions form a partition of unity.
  gen::Rng rng(31);
  for (int k = 0; k < 100; ++k) {
    const Vec2 p{gen::uniform(rng, 0, 1), gen::uniform(rng, 0, 1)};
    double s = 0.0;
    for (int n = 0; n < 36; ++n) s += coarse_hat(g5, n, p);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("build_domain validation") {
  const auto empty = build_domain(kUnit, {}, 16);
  CHECK(empty.area() == 1.0);

  const auto one = build_domain(kUnit, {{{0.5, 0.5}, 0.1}}, 16);
  const double polygon = 0.5 * 16 * 0.01 * std::sin(2.0 * std::numbers::pi / 16);
  CHECK(one.area() == doctest::Approx(1.0 - polygon).epsilon(1e-14));
  CHECK(std::abs(one.area() - (1.0 - std::numbers::pi * 0.01)) <= std::numbers::pi * 0.01 - polygon + 1e-14);
  CHECK(one.polygon(0).size() == 16);

  CHECK_THROWS_AS(build_domain(kUnit, {{{0.5, 0.5}, 0.1}, {{0.55, 0.5}, 0.1}}, 16), Error);
  try {
    build_domain(kUnit, {{{0.5, 0.5}, 0.1}, {{0.55, 0.5}, 0.1}}, 16);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverlappingInclusions);
  }
  try {
    build_domain(kUnit, {{{0.95, 0.5}, 0.1}}, 16);
    FAIL("expected InclusionOutsideDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InclusionOutsideDomain);
  }
}

TEST_CASE("fine mesh without inclusions") {
  const auto d = build_domain(kUnit, {}, 16);
  const auto g = build_coarse_grid(d, 0.2);
  MeshOptions o;
  o.h_target = 0.05;
  const auto m = generate_fine_mesh(d, g, o);
  check_mesh_invariants(d, g, m, 20.0);
  CHECK(std::count(m.node_markers.begin(), m.node_markers.end(), NodeMarker::Perforation) == 0);
}

TEST_CASE("fine mesh with one inclusion keeps every polygon vertex") {
  // Off-centre so the circle stays clear of every coarse line.
  const auto d = build_domain(kUnit, {{{0.47, 0.35}, 0.1}}, 16);
  const auto g = build_coarse_grid(d, 0.2);
  MeshOptions o;
  o.h_target = 1.0 / 40.0;
  const auto m = generate_fine_mesh(d, g, o);
  check_mesh_invariants(d, g, m, 20.0);
  for (const Vec2& v : d.polygon(0)) {
    const auto it = std::find_if(m.nodes.begin(), m.nodes.end(), [&](Vec2 p) { return distance(p, v) < 1e-12; });
    REQUIRE(it != m.nodes.end());
    CHECK(m.node_markers[static_cast<std::size_t>(it - m.nodes.begin())] == NodeMarker::Perforation);
  }
}

TEST_CASE("tangent inclusion is refused") {
  const auto d = build_domain(kUnit, {{{0.5, 0.3}, 0.1}}, 16);  // touches y = 0.2
  const auto g = build_coarse_grid(d, 0.2);
  try {
    generate_fine_mesh(d, g, MeshOptions{});
    FAIL("expected RefinementFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RefinementFailure);
  }
}

TEST_CASE("sampled preset meshes satisfy the mesh invariants") {
  // Generator: preset domains over several sampling seeds.
  for (const char* name : {"large", "small"}) {
    for (std::uint64_t seed : {1u, 7u, 19u}) {
      CAPTURE(name);
      CAPTURE(seed);
      const auto d = harness::sample_domain(*harness::find_preset(name), kUnit, 0.2, seed);
      const auto g = build_coarse_grid(d, 0.2);
      MeshOptions o;
      o.h_target = 0.06;
      const auto m = generate_fine_mesh(d, g, o);
      check_mesh_invariants(d, g, m, 20.0);
      CHECK(generate_fine_mesh(d, g, o) == m);  // determinism
    }
  }
}

TEST_CASE("benchmark domain gives a triangle count near 2188") {
  const auto d = harness::sample_domain(*harness::find_preset("large"), kUnit, 0.2, 7);
  const auto m = mesh_for(d, 0.2, 0.045);
  CHECK(m.num_triangles() > 2188 / 3);
  CHECK(m.num_triangles() < 2188 * 3);
}

TEST_CASE("neighborhoods") {
  const auto d = harness::sample_domain(*harness::find_preset("large"), kUnit, 0.2, 7);
  const auto g = build_coarse_grid(d, 0.2);
  MeshOptions o;
  o.h_target = 0.06;
  const auto m = generate_fine_mesh(d, g, o);

  std::vector<int> membership(m.num_triangles(), 0);
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
    CAPTURE(i);
    const auto nb = build_neighborhood(g, m, i);
    CHECK(nb.layers == 0);
    CHECK(nb.core_elements == nb.elements);
    CHECK(std::is_sorted(nb.nodes.begin(), nb.nodes.end()));
    std::set<int> parents;
    for (int e : nb.elements) {
      ++membership[static_cast<std::size_t>(e)];
      parents.insert(m.coarse_parent[static_cast<std::size_t>(e)]);
    }
    const auto around = g.triangles_around(i);
    CHECK(parents.size() == around.size());

    // Outline of ω_i: coarse edges of the surrounding triangles used once.
    std::map<std::pair<int, int>, int> coarse_edges;
    for (int ct : around)
      for (int k = 0; k < 3; ++k) {
        const auto& tri = g.triangles[static_cast<std::size_t>(ct)];
        const int a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
        ++coarse_edges[{std::min(a, b), std::max(a, b)}];
      }
    for (int v : nb.boundary_nodes) {
      CHECK(m.node_markers[static_cast<std::size_t>(v)] != NodeMarker::Perforation);
      bool on_outline = false;
      for (const auto& [e, c] : coarse_edges)
        if (c == 1 && point_segment_distance(m.nodes[static_cast<std::size_t>(v)], g.nodes[static_cast<std::size_t>(e.first)],
                                             g.nodes[static_cast<std::size_t>(e.second)]) < 1e-12)
          on_outline = true;
      CHECK(on_outline);
    }
  }
  for (int c : membership) CHECK((c >= 1 && c <= 3));

  const int interior = g.node_index(2, 2);
  CHECK(g.triangles_around(interior).size() == 6);
  const auto corner = g.triangles_around(g.node_index(0, 0));
  CHECK((corner.size() == 1 || corner.size() == 2));
}

TEST_CASE("oversampling") {
  const auto d = harness::sample_domain(*harness::find_preset("large"), kUnit, 0.2, 7);
  const auto g = build_coarse_grid(d, 0.2);
  MeshOptions o;
  o.h_target = 0.06;
  const auto m = generate_fine_mesh(d, g, o);

  for (int node : {g.node_index(2, 2), g.node_index(0, 0), g.node_index(5, 3)}) {
    CAPTURE(node);
    const auto nb = build_neighborhood(g, m, node);
    const auto same = oversample(nb, m, 0);
    CHECK(same.elements == nb.elements);
    CHECK(same.nodes == nb.nodes);

    const auto plus = oversample(nb, m, 2);
    CHECK(plus.layers == 2);
    CHECK(plus.core_elements == nb.elements);
    CHECK(std::includes(plus.elements.begin(), plus.elements.end(), nb.elements.begin(), nb.elements.end()));
    CHECK(plus.elements.size() > nb.elements.size());
    CHECK(std::adjacent_find(plus.elements.begin(), plus.elements.end()) == plus.elements.end());
    for (int e : plus.elements) CHECK((e >= 0 && e < static_cast<int>(m.num_triangles())));

    // Every element of ω_i⁺ is within two vertex-sharing steps of ω_i.
    std::set<int> reach(nb.nodes.begin(), nb.nodes.end());
    for (int step = 0; step < 2; ++step) {
      std::set<int> next = reach;
      for (const auto& t : m.triangles)
        if (reach.count(t[0]) || reach.count(t[1]) || reach.count(t[2])) next.insert(t.begin(), t.end());
      reach = std::move(next);
    }
    for (int e : plus.elements)
      for (int v : m.triangles[static_cast<std::size_t>(e)]) CHECK(reach.count(v) == 1);
  }
}

TEST_CASE("mesh file round trip and malformed input") {
  const auto d = harness::sample_domain(*harness::find_preset("large"), kUnit, 0.2, 7);
  const auto m = mesh_for(d, 0.2, 0.08);
  std::stringstream ss;
  write_mesh(ss, m);
  CHECK(read_mesh(ss) == m);

  const auto path = (std::filesystem::temp_directory_path() / "pmsfem_roundtrip_mesh.txt").string();
  save_mesh(m, path);
  CHECK(load_mesh(path) == m);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_mesh("/nonexistent/dir/mesh.txt"), Error);

  const auto expect_malformed = [](const std::string& text, const std::string& line) {
    std::istringstream in(text);
    try {
      read_mesh(in);
      FAIL("expected MalformedMeshFile");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedMeshFile);
      CHECK(e.detail().find("line " + line) != std::string::npos);
    }
  };
  const std::string nodes = "NODES 3\n0 0 0 1\n1 1 0 1\n2 0 1 1\n";
  expect_malformed(nodes + "TRIANGLES 1\n0 0 1 7 0\nEDGES 0\n", "6");   // missing node
  expect_malformed(nodes + "TRIANGLES 1\n0 0 2 1 0\nEDGES 0\n", "6");   // clockwise
  expect_malformed("NODES 2\n0 0 0 1\n", "2");                           // truncated
  expect_malformed("NODES 1\n0 zero 0 1\nTRIANGLES 0\nEDGES 0\n", "2");  // bad number
}
