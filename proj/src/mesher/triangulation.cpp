#include "triangulation.hpp"

#include "pmsfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pmsfem::mesher::detail {
namespace {

constexpr double kRelTol = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::RefinementFailure, msg); }

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

} // namespace

Triangulator::Triangulator(const Rect& bbox) : bbox_(bbox), scale_(std::max(bbox.width(), bbox.height())) {
  const int v0 = add_vertex(bbox.lo, true, -1);
  const int v1 = add_vertex({bbox.hi.x, bbox.lo.y}, true, -1);
  const int v2 = add_vertex(bbox.hi, true, -1);
  const int v3 = add_vertex({bbox.lo.x, bbox.hi.y}, true, -1);
  const int t0 = new_tri();
  const int t1 = new_tri();
  set_tri(t0, {v0, v1, v2}, {-1, t1, -1}, {false, false, false}, 0);
  set_tri(t1, {v0, v2, v3}, {-1, -1, t0}, {false, false, false}, 0);
  touched_.clear();
}

int Triangulator::add_vertex(Vec2 p, bool input, int original_segment) {
  pos_.push_back(p);
  input_.push_back(input);
  parent_segment_.push_back(original_segment);
  vtri_.push_back(-1);
  return static_cast<int>(pos_.size()) - 1;
}

int Triangulator::new_tri() {
  tris_.emplace_back();
  return static_cast<int>(tris_.size()) - 1;
}

void Triangulator::set_tri(int t, std::array<int, 3> v, std::array<int, 3> n, std::array<bool, 3> c, int region) {
  Tri& T = tri(t);
  T.v = v;
  T.n = n;
  T.c = c;
  T.region = region;
  for (int x : v) vtri_[static_cast<std::size_t>(x)] = t;
  touched_.push_back(t);
}

void Triangulator::replace_neighbor(int t, int old_nb, int new_nb) {
  if (t < 0) return;
  for (int& nb : tri(t).n)
    if (nb == old_nb) {
      nb = new_nb;
      return;
    }
}

void Triangulator::rotate_to(int t, int i) {
  if (i == 0) return;
  Tri& T = tri(t);
  std::rotate(T.v.begin(), T.v.begin() + i, T.v.end());
  std::rotate(T.n.begin(), T.n.begin() + i, T.n.end());
  std::rotate(T.c.begin(), T.c.begin() + i, T.c.end());
}

int Triangulator::orient_sign(Vec2 a, Vec2 b, Vec2 p) const {
  const double l = (b.x - a.x) * (p.y - a.y);
  const double r = (b.y - a.y) * (p.x - a.x);
  const double det = l - r;
  const double bound = kRelTol * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return 0;
}

bool Triangulator::in_circle(int t, Vec2 d) const {
  const Tri& T = tri(t);
  const Vec2 a = at(T.v[0]) - d, b = at(T.v[1]) - d, c = at(T.v[2]) - d;
  const double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
  const double bc = cross(b, c), ca = cross(c, a), ab = cross(a, b);
  const double det = a2 * bc + b2 * ca + c2 * ab;
  const double perm = a2 * (std::abs(b.x * c.y) + std::abs(b.y * c.x)) + b2 * (std::abs(c.x * a.y) + std::abs(c.y * a.x)) +
                      c2 * (std::abs(a.x * b.y) + std::abs(a.y * b.x));
  return det > kRelTol * perm;
}

Triangulator::Loc Triangulator::locate(Vec2 p, int hint) const {
  const auto classify = [&](int t) -> Loc {
    const Tri& T = tri(t);
    for (int k = 0; k < 3; ++k)
      if (distance(at(T.v[static_cast<std::size_t>(k)]), p) <= kRelTol * scale_)
        return {Loc::OnVertex, t, T.v[static_cast<std::size_t>(k)]};
    int zeros[3];
    int nz = 0;
    for (int i = 0; i < 3; ++i) {
      const int s = orient_sign(at(T.v[static_cast<std::size_t>((i + 1) % 3)]), at(T.v[static_cast<std::size_t>((i + 2) % 3)]), p);
      if (s < 0) return {Loc::Outside, t, i};
      if (s == 0) zeros[nz++] = i;
    }
    if (nz == 0) return {Loc::Inside, t, -1};
    if (nz == 1) return {Loc::OnEdge, t, zeros[0]};
    return {Loc::OnVertex, t, T.v[static_cast<std::size_t>(3 - zeros[0] - zeros[1])]};
  };

  int t = (hint >= 0 && hint < static_cast<int>(tris_.size())) ? hint : 0;
  const std::size_t cap = 4 * tris_.size() + 100;
  for (std::size_t step = 0; step < cap; ++step) {
    const Tri& T = tri(t);
    int next = -2;
    for (int k = 0; k < 3; ++k) {
      const int i = static_cast<int>((k + step) % 3);
      if (orient_sign(at(T.v[static_cast<std::size_t>((i + 1) % 3)]), at(T.v[static_cast<std::size_t>((i + 2) % 3)]), p) < 0) {
        next = T.n[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (next == -2) return classify(t);
    if (next == -1) return {Loc::Outside, t, -1};
    t = next;
  }
  // The visibility walk can cycle in a constrained triangulation; fall back to a scan.
  for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
    const Loc loc = classify(s);
    if (loc.kind != Loc::Outside) return loc;
  }
  return {Loc::Outside, -1, -1};
}

void Triangulator::split_triangle(int t, int p) {
  const Tri old = tri(t);
  const int t1 = new_tri();
  const int t2 = new_tri();
  const auto [a, b, c] = old.v;
  set_tri(t, {p, b, c}, {old.n[0], t1, t2}, {old.c[0], false, false}, old.region);
  set_tri(t1, {a, p, c}, {t, old.n[1], t2}, {false, old.c[1], false}, old.region);
  set_tri(t2, {a, b, p}, {t, t1, old.n[2]}, {false, false, old.c[2]}, old.region);
  replace_neighbor(old.n[1], t, t1);
  replace_neighbor(old.n[2], t, t2);
  legalize(t, p);
  legalize(t1, p);
  legalize(t2, p);
}

void Triangulator::split_edge(int t, int i, int p) {
  rotate_to(t, i);
  const Tri T = tri(t);
  const auto [a, b, c] = T.v;
  const int u = T.n[0];
  const bool cs = T.c[0];
  const int t2 = new_tri();
  if (u < 0) {
    set_tri(t, {a, b, p}, {-1, t2, T.n[2]}, {cs, false, T.c[2]}, T.region);
    set_tri(t2, {a, p, c}, {-1, T.n[1], t}, {cs, T.c[1], false}, T.region);
    replace_neighbor(T.n[1], t, t2);
    legalize(t, p);
    legalize(t2, p);
    return;
  }
  const auto& un = tri(u).n;
  const int j = static_cast<int>(std::find(un.begin(), un.end(), t) - un.begin());
  rotate_to(u, j);
  const Tri U = tri(u);
  const int d = U.v[0];
  const int u2 = new_tri();
  set_tri(t, {a, b, p}, {u2, t2, T.n[2]}, {cs, false, T.c[2]}, T.region);
  set_tri(t2, {a, p, c}, {u, T.n[1], t}, {cs, T.c[1], false}, T.region);
  set_tri(u, {d, c, p}, {t2, u2, U.n[2]}, {cs, false, U.c[2]}, U.region);
  set_tri(u2, {d, p, b}, {t, U.n[1], u}, {cs, U.c[1], false}, U.region);
  replace_neighbor(T.n[1], t, t2);
  replace_neighbor(U.n[1], u, u2);
  legalize(t, p);
  legalize(t2, p);
  legalize(u, p);
  legalize(u2, p);
}

void Triangulator::legalize(int start, int p) {
  std::vector<int> stack{start};
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    const auto& tv = tri(t).v;
    const auto it = std::find(tv.begin(), tv.end(), p);
    if (it == tv.end()) continue;
    const int i = static_cast<int>(it - tv.begin());
    const int u = tri(t).n[static_cast<std::size_t>(i)];
    if (u < 0 || tri(t).c[static_cast<std::size_t>(i)]) continue;
    const auto& un = tri(u).n;
    const int j = static_cast<int>(std::find(un.begin(), un.end(), t) - un.begin());
    if (!in_circle(t, at(tri(u).v[static_cast<std::size_t>(j)]))) continue;

    rotate_to(t, i);
    rotate_to(u, j);
    const Tri T = tri(t);
    const Tri U = tri(u);
    const int b = T.v[1], c = T.v[2], d = U.v[0];
    set_tri(t, {p, b, d}, {U.n[1], u, T.n[2]}, {U.c[1], false, T.c[2]}, T.region);
    set_tri(u, {p, d, c}, {U.n[2], T.n[1], t}, {U.c[2], T.c[1], false}, T.region);
    replace_neighbor(U.n[1], u, t);
    replace_neighbor(T.n[1], t, u);
    stack.push_back(t);
    stack.push_back(u);
  }
}

int Triangulator::insert_at(const Loc& loc, Vec2 p, bool input, int original_segment) {
  if (loc.kind == Loc::OnVertex) {
    if (input) input_[static_cast<std::size_t>(loc.index)] = true;
    return loc.index;
  }
  if (loc.kind == Loc::Outside) fail("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") lies outside the bbox");
  if (loc.kind == Loc::OnEdge && tri(loc.tri).c[static_cast<std::size_t>(loc.index)])
    fail("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") falls on a constrained edge");
  const int v = add_vertex(p, input, original_segment);
  touched_.clear();
  if (loc.kind == Loc::Inside)
    split_triangle(loc.tri, v);
  else
    split_edge(loc.tri, loc.index, v);
  last_tri_ = vtri_[static_cast<std::size_t>(v)];
  if (refining_) note_touched();
  return v;
}

int Triangulator::insert_input_vertex(Vec2 p) { return insert_at(locate(p, last_tri_), p, true, -1); }

std::vector<int> Triangulator::triangles_around(int v) const {
  std::vector<int> out;
  const int t0 = vtri_[static_cast<std::size_t>(v)];
  if (t0 < 0) return out;
  const auto index_of = [&](int t) {
    const auto& tv = tri(t).v;
    return static_cast<std::size_t>(std::find(tv.begin(), tv.end(), v) - tv.begin());
  };
  int t = t0;
  while (true) {
    out.push_back(t);
    const int next = tri(t).n[(index_of(t) + 1) % 3];
    if (next == t0) return out;
    if (next < 0) break;
    t = next;
  }
  t = t0;
  while (true) {
    const int next = tri(t).n[(index_of(t) + 2) % 3];
    if (next < 0) break;
    out.push_back(next);
    t = next;
  }
  return out;
}

std::pair<int, int> Triangulator::find_edge(int a, int b) const {
  for (int t : triangles_around(a)) {
    const auto& tv = tri(t).v;
    const std::size_t k = static_cast<std::size_t>(std::find(tv.begin(), tv.end(), a) - tv.begin());
    if (tv[(k + 1) % 3] == b) return {t, static_cast<int>((k + 2) % 3)};
    if (tv[(k + 2) % 3] == b) return {t, static_cast<int>((k + 1) % 3)};
  }
  return {-1, -1};
}

void Triangulator::constrain_edge(int a, int b, int original) {
  const auto [t, i] = find_edge(a, b);
  tri(t).c[static_cast<std::size_t>(i)] = true;
  const int u = tri(t).n[static_cast<std::size_t>(i)];
  if (u >= 0)
    for (std::size_t j = 0; j < 3; ++j)
      if (tri(u).n[j] == t) tri(u).c[j] = true;
  subsegments_[key(a, b)] = Subsegment{original};
}

Vec2 Triangulator::split_point(int a, int b) const {
  const Vec2 A = at(a), B = at(b);
  const double len = distance(A, B);
  const bool ia = input_[static_cast<std::size_t>(a)];
  const bool ib = input_[static_cast<std::size_t>(b)];
  if (ia != ib) {
    // Split on a power-of-two shell around the input vertex so that segments
    // sharing that vertex get matching split points.
    const Vec2 base = ia ? A : B;
    const Vec2 other = ia ? B : A;
    const double d = std::exp2(std::round(std::log2(0.5 * len)));
    if (d > 0.25 * len && d < 0.75 * len) return base + (d / len) * (other - base);
  }
  return 0.5 * (A + B);
}

void Triangulator::recover_segment(int a, int b) {
  const int original = static_cast<int>(originals_.size());
  originals_.push_back({a, b});
  std::vector<std::array<int, 2>> stack{{a, b}};
  std::size_t splits = 0;
  while (!stack.empty()) {
    const auto [p, q] = stack.back();
    stack.pop_back();
    if (find_edge(p, q).first >= 0) {
      constrain_edge(p, q, original);
      continue;
    }
    if (++splits > 100000) fail("segment recovery did not converge");
    const Vec2 m = split_point(p, q);
    const Loc loc = locate(m, vtri_[static_cast<std::size_t>(p)]);
    if (loc.kind == Loc::OnVertex) fail("a vertex lies on the interior of an input segment");
    const int v = insert_at(loc, m, false, original);
    stack.push_back({v, q});
    stack.push_back({p, v});
  }
  touched_.clear();
}

void Triangulator::mark_holes(const std::function<bool(Vec2)>& in_hole) {
  for (Tri& T : tris_) {
    const Vec2 g = (1.0 / 3.0) * (at(T.v[0]) + at(T.v[1]) + at(T.v[2]));
    T.region = in_hole(g) ? 1 : 0;
  }
}

int Triangulator::split_subsegment(int a, int b) {
  const int original = subsegments_.at(key(a, b)).original;
  const auto [t, i] = find_edge(a, b);
  if (t < 0) fail("constrained subsegment is missing from the triangulation");
  const Vec2 m = split_point(a, b);
  const int v = add_vertex(m, false, original);
  touched_.clear();
  subsegments_.erase(key(a, b));
  subsegments_[key(a, v)] = Subsegment{original};
  subsegments_[key(v, b)] = Subsegment{original};
  split_edge(t, i, v);
  last_tri_ = vtri_[static_cast<std::size_t>(v)];
  if (refining_) note_touched();
  return v;
}

bool Triangulator::subsegment_encroached(int a, int b) const {
  const auto [t, i] = find_edge(a, b);
  if (t < 0) return false;
  const Vec2 A = at(a), B = at(b);
  const auto apex_inside = [&](int s, int k) {
    if (tri(s).region != 0) return false;
    const Vec2 d = at(tri(s).v[static_cast<std::size_t>(k)]);
    return dot(A - d, B - d) < -kRelTol * distance(A, d) * distance(B, d);
  };
  if (apex_inside(t, i)) return true;
  const int u = tri(t).n[static_cast<std::size_t>(i)];
  if (u < 0) return false;
  for (int k = 0; k < 3; ++k)
    if (tri(u).n[static_cast<std::size_t>(k)] == t) return apex_inside(u, k);
  return false;
}

void Triangulator::note_touched() {
  for (int t : touched_) {
    bad_queue_.push_back(t);
    const Tri& T = tri(t);
    if (T.region != 0) continue;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!T.c[i]) continue;
      const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      const Vec2 d = at(T.v[i]);
      if (dot(at(a) - d, at(b) - d) < 0.0) encroached_queue_.push_back({a, b});
    }
  }
  touched_.clear();
}

bool Triangulator::small_input_angle_skip(int t) const {
  // A skinny triangle whose shortest edge joins two different segments that
  // meet at a sharp input angle cannot be improved by refinement.
  const Tri& T = tri(t);
  std::size_t e = 0;
  double shortest = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double l = distance(at(T.v[(i + 1) % 3]), at(T.v[(i + 2) % 3]));
    if (i == 0 || l < shortest) {
      shortest = l;
      e = i;
    }
  }
  const auto segments_of = [&](int v) {
    std::vector<int> out;
    const int parent = parent_segment_[static_cast<std::size_t>(v)];
    if (parent >= 0) {
      out.push_back(parent);
    } else if (input_[static_cast<std::size_t>(v)]) {
      for (std::size_t s = 0; s < originals_.size(); ++s)
        if (originals_[s][0] == v || originals_[s][1] == v) out.push_back(static_cast<int>(s));
    }
    return out;
  };
  const auto su = segments_of(T.v[(e + 1) % 3]);
  const auto sw = segments_of(T.v[(e + 2) % 3]);
  for (int s1 : su)
    for (int s2 : sw) {
      if (s1 == s2) continue;
      const auto& o1 = originals_[static_cast<std::size_t>(s1)];
      const auto& o2 = originals_[static_cast<std::size_t>(s2)];
      for (int z : o1) {
        if (z != o2[0] && z != o2[1]) continue;
        const int x = o1[0] == z ? o1[1] : o1[0];
        const int y = o2[0] == z ? o2[1] : o2[0];
        const Vec2 u = at(x) - at(z), w = at(y) - at(z);
        const double angle = std::atan2(std::abs(cross(u, w)), dot(u, w)) * 180.0 / std::numbers::pi;
        if (angle < 60.0) return true;
      }
    }
  return false;
}

bool Triangulator::is_bad(int t, double h_target, double ratio_bound) const {
  const Tri& T = tri(t);
  if (T.region != 0) return false;
  const Vec2 a = at(T.v[0]), b = at(T.v[1]), c = at(T.v[2]);
  const double l0 = distance(b, c), l1 = distance(c, a), l2 = distance(a, b);
  if (std::max({l0, l1, l2}) > h_target) return true;
  const double twice_area = orient(a, b, c);
  const double circumradius = l0 * l1 * l2 / (2.0 * twice_area);
  if (circumradius / std::min({l0, l1, l2}) <= ratio_bound) return false;
  return !small_input_angle_skip(t);
}

void Triangulator::refine(double h_target, double min_angle_deg, std::size_t max_vertices) {
  refining_ = true;
  const double ratio_bound = 1.0 / (2.0 * std::sin(min_angle_deg * std::numbers::pi / 180.0));
  touched_.clear();
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t) touched_.push_back(t);
  note_touched();

  std::vector<std::pair<int, int>> encroached;
  while (true) {
    if (pos_.size() > max_vertices)
      fail("refinement exceeded " + std::to_string(max_vertices) + " vertices (angle bound or size target unattainable)");
    if (!encroached_queue_.empty()) {
      const auto [a, b] = encroached_queue_.front();
      encroached_queue_.pop_front();
      if (subsegments_.count(key(a, b)) && subsegment_encroached(a, b)) split_subsegment(a, b);
      continue;
    }
    if (bad_queue_.empty()) break;
    const int t = bad_queue_.front();
    bad_queue_.pop_front();
    if (!is_bad(t, h_target, ratio_bound)) continue;

    const Tri T = tri(t);
    const Vec2 a = at(T.v[0]), b = at(T.v[1]), c = at(T.v[2]);
    const Vec2 cc = circumcenter(a, b, c);
    const Vec2 from = (1.0 / 3.0) * (a + b + c);

    // Walk from the triangle toward its circumcenter; a constraint in the way is encroached.
    int cur = t;
    int blocked = -1;
    const std::size_t cap = 4 * tris_.size() + 100;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& C = tri(cur);
      int pick = -1;
      int fallback = -1;
      for (int i = 0; i < 3; ++i) {
        const Vec2 ea = at(C.v[static_cast<std::size_t>((i + 1) % 3)]);
        const Vec2 eb = at(C.v[static_cast<std::size_t>((i + 2) % 3)]);
        if (orient_sign(ea, eb, cc) >= 0) continue;
        if (fallback < 0) fallback = i;
        if (orient_sign(from, cc, ea) * orient_sign(from, cc, eb) <= 0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = fallback;
      if (pick < 0) break;
      if (C.c[static_cast<std::size_t>(pick)] || C.n[static_cast<std::size_t>(pick)] < 0) {
        blocked = pick;
        break;
      }
      cur = C.n[static_cast<std::size_t>(pick)];
    }
    if (blocked >= 0) {
      const Tri& C = tri(cur);
      split_subsegment(C.v[static_cast<std::size_t>((blocked + 1) % 3)], C.v[static_cast<std::size_t>((blocked + 2) % 3)]);
      bad_queue_.push_back(t);
      continue;
    }

    encroached.clear();
    for (const auto& [k, s] : subsegments_) {
      const Vec2 A = at(k.first), B = at(k.second);
      const Vec2 mid = 0.5 * (A + B);
      const double r2 = 0.25 * dot(B - A, B - A);
      if (dot(cc - mid, cc - mid) < r2 * (1.0 - kRelTol)) encroached.push_back(k);
    }
    if (!encroached.empty()) {
      for (const auto& [p, q] : encroached)
        if (subsegments_.count(key(p, q))) split_subsegment(p, q);
      bad_queue_.push_back(t);
      continue;
    }

    const Loc loc = locate(cc, cur);
    if (loc.kind == Loc::OnVertex || loc.kind == Loc::Outside) continue;
    if (loc.kind == Loc::OnEdge && tri(loc.tri).c[static_cast<std::size_t>(loc.index)]) {
      const Tri& C = tri(loc.tri);
      split_subsegment(C.v[static_cast<std::size_t>((loc.index + 1) % 3)], C.v[static_cast<std::size_t>((loc.index + 2) % 3)]);
      bad_queue_.push_back(t);
      continue;
    }
    insert_at(loc, cc, false, -1);
  }
  refining_ = false;
}

} // namespace pmsfem::mesher::detail
