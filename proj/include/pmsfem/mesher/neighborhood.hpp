#pragma once

#include "pmsfem/mesher/fine_mesh.hpp"

#include <vector>

namespace pmsfem::mesher {

/// Fine-mesh patch around one coarse node: the coarse neighborhood ω_i, or the
/// oversampled region ω_i⁺ when `layers > 0`. Index lists are ascending.
struct Neighborhood {
  int coarse_node = -1;
  int layers = 0;
  std::vector<int> elements;           ///< fine triangles of the patch
  std::vector<int> core_elements;      ///< fine triangles of ω_i (== elements when layers == 0)
  std::vector<int> nodes;              ///< local-to-global fine node map
  std::vector<int> boundary_nodes;     ///< on the patch boundary, excluding perforation nodes
  std::vector<int> perforation_nodes;  ///< patch nodes on hole boundaries
  std::vector<std::array<int, 2>> boundary_edges;  ///< patch-boundary edges that are not on a hole
};

Neighborhood build_neighborhood(const CoarseGrid& coarse, const FineMesh& fine, int coarse_node);

/// Grows the patch by `t` rings of fine triangles; each ring holds every
/// triangle sharing a vertex with the region grown so far.
Neighborhood oversample(const Neighborhood& nb, const FineMesh& fine, int t);

} // namespace pmsfem::mesher
