#pragma once

#include "pmsfem/mesher/geometry.hpp"

#include <vector>

namespace pmsfem::mesher {

/// Rectangle minus a set of circular holes. Each hole is meshed as an
/// inscribed regular polygon with `polygon_segments` sides.
struct PerforatedDomain {
  Rect bbox;
  std::vector<Circle> inclusions;
  int polygon_segments = 16;

  /// Vertices of the polygon approximating inclusion `i`, counter-clockwise.
  std::vector<Vec2> polygon(std::size_t i) const;
  /// Area of the bbox minus the polygonal holes.
  double area() const;
};

/// Throws OverlappingInclusions, InclusionOutsideDomain or InvalidDomain.
PerforatedDomain build_domain(const Rect& bbox, std::vector<Circle> inclusions, int polygon_segments);

} // namespace pmsfem::mesher
