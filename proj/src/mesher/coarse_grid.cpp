#include "pmsfem/mesher/coarse_grid.hpp"

#include "pmsfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pmsfem::mesher {
namespace {

int divisions(double length, double H) {
  const double q = length / H;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 1e-9 * std::max(1.0, q))
    throw Error(ErrorCode::NonDivisibleH, "side length " + std::to_string(length) + " is not a multiple of H=" + std::to_string(H));
  return static_cast<int>(n);
}

} // namespace

CoarseGrid build_coarse_grid(const PerforatedDomain& domain, double H) {
  if (!(H > 0.0)) throw Error(ErrorCode::NonDivisibleH, "H must be positive");
  CoarseGrid g;
  g.bbox = domain.bbox;
  g.H = H;
  g.nx = divisions(domain.bbox.width(), H);
  g.ny = divisions(domain.bbox.height(), H);
  g.nodes.reserve(static_cast<std::size_t>((g.nx + 1) * (g.ny + 1)));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      g.nodes.push_back({domain.bbox.lo.x + domain.bbox.width() * i / g.nx, domain.bbox.lo.y + domain.bbox.height() * j / g.ny});
  g.triangles.reserve(static_cast<std::size_t>(2 * g.nx * g.ny));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int a = g.node_index(i, j), b = g.node_index(i + 1, j), c = g.node_index(i + 1, j + 1), d = g.node_index(i, j + 1);
      g.triangles.push_back({a, b, c});
      g.triangles.push_back({a, c, d});
    }
  return g;
}

int CoarseGrid::locate(Vec2 p) const {
  const double hx = bbox.width() / nx;
  const double hy = bbox.height() / ny;
  const int i = std::clamp(static_cast<int>(std::floor((p.x - bbox.lo.x) / hx)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - bbox.lo.y) / hy)), 0, ny - 1);
  const double xi = (p.x - bbox.lo.x) / hx - i;
  const double eta = (p.y - bbox.lo.y) / hy - j;
  return 2 * (j * nx + i) + (xi >= eta ? 0 : 1);
}

std::vector<int> CoarseGrid::triangles_around(int node) const {
  std::vector<int> out;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    if (std::find(triangles[t].begin(), triangles[t].end(), node) != triangles[t].end()) out.push_back(static_cast<int>(t));
  return out;
}

double coarse_hat(const CoarseGrid& grid, int node, Vec2 p) {
  const auto& tri = grid.triangles[static_cast<std::size_t>(grid.locate(p))];
  for (int k = 0; k < 3; ++k) {
    if (tri[static_cast<std::size_t>(k)] != node) continue;
    const Vec2 a = grid.nodes[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
    const Vec2 b = grid.nodes[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 1) % 3)])];
    const Vec2 c = grid.nodes[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 2) % 3)])];
    return std::clamp(orient(p, b, c) / orient(a, b, c), 0.0, 1.0);
  }
  return 0.0;
}

} // namespace pmsfem::mesher
