#include "pmsfem/harness/presets.hpp"

#include "pmsfem/error.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace pmsfem::harness {

std::optional<DomainPreset> find_preset(std::string_view name) noexcept {
  if (name == "large") return DomainPreset{"large", 12, 0.06, 0.10, 16};
  if (name == "small") return DomainPreset{"small", 60, 0.015, 0.03, 8};
  if (name == "none") return DomainPreset{"none", 0, 0.0, 0.0, 16};
  return std::nullopt;
}

namespace {

// Signed distances from p to the coarse lines x = iH, y = jH and y - x = kH.
template <class F>
void for_each_line_distance(const mesher::Rect& bbox, double h, mesher::Vec2 p, F&& f) {
  const mesher::Vec2 q = p - bbox.lo;
  const int nx = static_cast<int>(std::lround(bbox.width() / h));
  const int ny = static_cast<int>(std::lround(bbox.height() / h));
  for (int i = 0; i <= nx; ++i) f(q.x - i * h);
  for (int j = 0; j <= ny; ++j) f(q.y - j * h);
  for (int k = -nx; k <= ny; ++k) f((q.y - q.x - k * h) / std::numbers::sqrt2);
}

bool admissible(const mesher::Circle& c, const std::vector<mesher::Circle>& placed, const mesher::Rect& bbox, double h, int segments) {
  const double r = c.radius;
  const double margin = 0.3 * r;
  const double wall = margin + 0.01;
  if (c.center.x - r < bbox.lo.x + wall || c.center.x + r > bbox.hi.x - wall || c.center.y - r < bbox.lo.y + wall ||
      c.center.y + r > bbox.hi.y - wall)
    return false;
  for (const auto& o : placed)
    if (mesher::distance(o.center, c.center) < o.radius + r + 0.02) return false;

  const int nx = static_cast<int>(std::lround(bbox.width() / h));
  const int ny = static_cast<int>(std::lround(bbox.height() / h));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      if (mesher::distance(bbox.lo + mesher::Vec2{i * h, j * h}, c.center) < r + margin) return false;

  bool ok = true;
  for_each_line_distance(bbox, h, c.center, [&](double d) {
    d = std::abs(d);
    if (d < r && d > 0.7 * r) ok = false;  // grazing cut
    if (d >= r && d < r + margin) ok = false;
  });
  if (!ok) return false;

  const double edge = 2.0 * r * std::sin(std::numbers::pi / segments);
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * std::numbers::pi * k / segments;
    const mesher::Vec2 v = c.center + r * mesher::Vec2{std::cos(a), std::sin(a)};
    for_each_line_distance(bbox, h, v, [&](double d) {
      if (std::abs(d) < 0.2 * edge) ok = false;
    });
  }
  return ok;
}

} // namespace

mesher::PerforatedDomain sample_domain(const DomainPreset& preset, const mesher::Rect& bbox, double coarse_h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<mesher::Circle> circles;
  constexpr int max_attempts = 200000;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(circles.size()) < preset.count; ++attempt) {
    const mesher::Vec2 center{bbox.lo.x + bbox.width() * unit(rng), bbox.lo.y + bbox.height() * unit(rng)};
    const double r = preset.radius_min + (preset.radius_max - preset.radius_min) * unit(rng);
    const mesher::Circle c{center, r};
    if (admissible(c, circles, bbox, coarse_h, preset.polygon_segments)) circles.push_back(c);
  }
  if (static_cast<int>(circles.size()) < preset.count)
    throw Error(ErrorCode::InvalidConfig, "preset '" + std::string(preset.name) + "' placed only " + std::to_string(circles.size()) +
                                              " of " + std::to_string(preset.count) + " inclusions");
  return mesher::build_domain(bbox, std::move(circles), preset.polygon_segments);
}

fem::BoundaryData benchmark_boundary(fem::OperatorKind kind, const mesher::Rect& bbox) {
  fem::BoundaryData bc;
  const double tol = 1e-12 * std::max(bbox.width(), bbox.height());
  switch (kind) {
    case fem::OperatorKind::Laplace:
      bc.components = 1;
      bc.outer = [](mesher::Vec2, int) -> std::optional<double> { return 1.0; };
      break;
    case fem::OperatorKind::Elasticity:
      bc.components = 2;
      bc.outer = [bbox, tol](mesher::Vec2 p, int c) -> std::optional<double> {
        if (c == 0 && std::abs(p.x - bbox.lo.x) <= tol) return 0.0;
        if (c == 1 && std::abs(p.y - bbox.lo.y) <= tol) return 0.0;
        return std::nullopt;
      };
      bc.load = [](mesher::Vec2, int) { return 1e7; };
      break;
    case fem::OperatorKind::Stokes:
      bc.components = 2;
      bc.outer = [](mesher::Vec2, int c) -> std::optional<double> { return c == 0 ? 1.0 : 0.0; };
      break;
  }
  return bc;
}

} // namespace pmsfem::harness
