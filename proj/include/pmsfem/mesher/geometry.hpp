#pragma once

#include <cmath>
#include <span>

namespace pmsfem::mesher {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Rect {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

inline double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * orient(a, b, c); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Even-odd rule; points on the boundary may go either way.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

double polygon_area(std::span<const Vec2> polygon);

/// Smallest interior angle of a triangle, in degrees.
double min_angle_deg(Vec2 a, Vec2 b, Vec2 c);

} // namespace pmsfem::mesher
