#include "pmsfem/mesher/domain.hpp"

#include "pmsfem/error.hpp"

#include <numbers>
#include <string>

namespace pmsfem::mesher {

std::vector<Vec2> PerforatedDomain::polygon(std::size_t i) const {
  const Circle& c = inclusions.at(i);
  std::vector<Vec2> pts(static_cast<std::size_t>(polygon_segments));
  for (int k = 0; k < polygon_segments; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / polygon_segments;
    pts[static_cast<std::size_t>(k)] = {c.center.x + c.radius * std::cos(phi), c.center.y + c.radius * std::sin(phi)};
  }
  return pts;
}

double PerforatedDomain::area() const {
  double a = bbox.area();
  for (std::size_t i = 0; i < inclusions.size(); ++i) a -= polygon_area(polygon(i));
  return a;
}

PerforatedDomain build_domain(const Rect& bbox, std::vector<Circle> inclusions, int polygon_segments) {
  if (!(bbox.width() > 0.0) || !(bbox.height() > 0.0))
    throw Error(ErrorCode::InvalidDomain, "bbox must have positive width and height");
  if (polygon_segments < 8)
    throw Error(ErrorCode::InvalidDomain, "polygon_segments must be at least 8, got " + std::to_string(polygon_segments));
  for (std::size_t i = 0; i < inclusions.size(); ++i) {
    const Circle& c = inclusions[i];
    if (!(c.radius > 0.0)) throw Error(ErrorCode::InvalidDomain, "inclusion " + std::to_string(i) + " has nonpositive radius");
    if (!(c.center.x - c.radius > bbox.lo.x && c.center.x + c.radius < bbox.hi.x && c.center.y - c.radius > bbox.lo.y &&
          c.center.y + c.radius < bbox.hi.y))
      throw Error(ErrorCode::InclusionOutsideDomain, "inclusion " + std::to_string(i) + " is not strictly inside the bbox");
  }
  for (std::size_t i = 0; i < inclusions.size(); ++i)
    for (std::size_t j = i + 1; j < inclusions.size(); ++j)
      if (!(distance(inclusions[i].center, inclusions[j].center) > inclusions[i].radius + inclusions[j].radius))
        throw Error(ErrorCode::OverlappingInclusions,
                    "inclusions " + std::to_string(i) + " and " + std::to_string(j) + " intersect or touch");
  return PerforatedDomain{bbox, std::move(inclusions), polygon_segments};
}

} // namespace pmsfem::mesher
