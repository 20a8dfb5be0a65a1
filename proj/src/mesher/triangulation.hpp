#pragma once

#include "pmsfem/mesher/fine_mesh.hpp"

#include <array>
#include <deque>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace pmsfem::mesher::detail {

/// Incremental constrained Delaunay triangulation inside a rectangle, with
/// Ruppert refinement. Triangles are never deleted; splits and flips rewrite
/// slots in place. Edge k of a triangle is opposite vertex k.
class Triangulator {
public:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{-1, -1, -1};
    std::array<bool, 3> c{false, false, false};
    int region = 0;  ///< 0 = meshed domain, 1 = hole
  };

  explicit Triangulator(const Rect& bbox);

  /// Inserts an input vertex; returns the id of an existing vertex at the same position.
  int insert_input_vertex(Vec2 p);
  /// Makes the straight segment a-b a union of triangulation edges.
  void recover_segment(int a, int b);
  /// Labels every triangle by a centroid test; call once all segments are present.
  void mark_holes(const std::function<bool(Vec2)>& in_hole);
  void refine(double h_target, double min_angle_deg, std::size_t max_vertices);

  const std::vector<Vec2>& vertices() const { return pos_; }
  const std::vector<Tri>& triangles() const { return tris_; }

private:
  struct Loc {
    enum Kind { Inside, OnEdge, OnVertex, Outside } kind = Outside;
    int tri = -1;
    int index = -1;  ///< edge index for OnEdge, vertex id for OnVertex
  };
  struct Subsegment {
    int original = -1;
  };

  Vec2 at(int v) const { return pos_[static_cast<std::size_t>(v)]; }
  Tri& tri(int t) { return tris_[static_cast<std::size_t>(t)]; }
  const Tri& tri(int t) const { return tris_[static_cast<std::size_t>(t)]; }

  int add_vertex(Vec2 p, bool input, int original_segment);
  int new_tri();
  void set_tri(int t, std::array<int, 3> v, std::array<int, 3> n, std::array<bool, 3> c, int region);
  void replace_neighbor(int t, int old_nb, int new_nb);
  void rotate_to(int t, int i);

  int orient_sign(Vec2 a, Vec2 b, Vec2 p) const;
  bool in_circle(int t, Vec2 d) const;

  Loc locate(Vec2 p, int hint) const;
  int insert_at(const Loc& loc, Vec2 p, bool input, int original_segment);
  void split_triangle(int t, int p);
  void split_edge(int t, int i, int p);
  void legalize(int t, int p);

  std::vector<int> triangles_around(int v) const;
  /// Triangle and edge index of edge a-b, or {-1, -1}.
  std::pair<int, int> find_edge(int a, int b) const;
  void constrain_edge(int a, int b, int original);

  Vec2 split_point(int a, int b) const;
  int split_subsegment(int a, int b);
  bool subsegment_encroached(int a, int b) const;
  void note_touched();
  bool is_bad(int t, double h_target, double ratio_bound) const;
  bool small_input_angle_skip(int t) const;

  static std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

  Rect bbox_;
  double scale_ = 1.0;
  std::vector<Vec2> pos_;
  std::vector<bool> input_;
  std::vector<int> parent_segment_;  ///< original segment a Steiner vertex lies on, -1 otherwise
  std::vector<int> vtri_;            ///< some triangle incident to each vertex
  std::vector<Tri> tris_;
  std::vector<std::array<int, 2>> originals_;
  std::map<std::pair<int, int>, Subsegment> subsegments_;
  std::vector<int> touched_;
  std::deque<int> bad_queue_;
  std::deque<std::pair<int, int>> encroached_queue_;
  int last_tri_ = 0;
  bool refining_ = false;
};

} // namespace pmsfem::mesher::detail
