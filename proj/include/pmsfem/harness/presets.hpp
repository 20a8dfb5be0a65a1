#pragma once

#include "pmsfem/fem/assembly.hpp"
#include "pmsfem/mesher/domain.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace pmsfem::harness {

/// Random circular perforations drawn by rejection sampling.
struct DomainPreset {
  std::string_view name;
  int count = 0;
  double radius_min = 0.0;
  double radius_max = 0.0;
  int polygon_segments = 16;
};

/// `large` (12 circles, r in [0.06, 0.10]), `small` (60 circles, r in
/// [0.015, 0.03]) or `none` (no perforations).
std::optional<DomainPreset> find_preset(std::string_view name) noexcept;

/// Samples the preset inside `bbox`. Circles keep clear of each other, of the
/// outer boundary and of the coarse nodes; a coarse line either misses a
/// circle by a margin or cuts well through it, and polygon vertices stay away
/// from coarse lines, so the fine mesher never meets near-degenerate input.
/// Throws InvalidConfig when the preset cannot be placed.
mesher::PerforatedDomain sample_domain(const DomainPreset& preset, const mesher::Rect& bbox, double coarse_h, std::uint64_t seed);

/// Boundary conditions and loads of the benchmark problems on the unit square:
/// Laplace u = 1 on the outer boundary; elasticity with u_x = 0 on the left,
/// u_y = 0 on the bottom, traction-free top and right and body force
/// (1e7, 1e7); Stokes with u = (1, 0) on the outer boundary.
fem::BoundaryData benchmark_boundary(fem::OperatorKind kind, const mesher::Rect& bbox);

} // namespace pmsfem::harness
