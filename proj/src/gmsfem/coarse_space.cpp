#include "pmsfem/gmsfem/coarse_space.hpp"

#include "pmsfem/error.hpp"

#include <algorithm>
#include <string>

namespace pmsfem::gmsfem {

PartitionOfUnity build_partition_of_unity(const mesher::CoarseGrid& coarse, const fem::FeSpace& space) {
  PartitionOfUnity pou;
  pou.num_coarse_nodes = coarse.nodes.size();
  pou.values.assign(coarse.nodes.size(), linalg::Vector(space.num_nodes(), 0.0));
  for (std::size_t node = 0; node < space.num_nodes(); ++node) {
    const mesher::Vec2 p = space.node_coords[node];
    const auto& tri = coarse.triangles[static_cast<std::size_t>(coarse.locate(p))];
    for (const int c : tri) pou.values[static_cast<std::size_t>(c)][node] = mesher::coarse_hat(coarse, c, p);
  }
  return pou;
}

CoarseSpace assemble_coarse_space(const fem::FineSystem& system, const PartitionOfUnity& pou, const std::vector<LocalBasis>& bases,
                                  RankPolicy policy, double rank_tol) {
  if (bases.size() != pou.num_coarse_nodes)
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(bases.size()) + " local bases for " + std::to_string(pou.num_coarse_nodes) + " coarse nodes");
  const int comps = system.space.components;
  const int n = static_cast<int>(system.num_dofs());

  std::vector<linalg::Triplet> t;
  std::vector<int> row_node, row_mode;
  int row = 0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const LocalBasis& b = bases[i];
    if (b.vectors.rows() != b.dofs.size()) throw Error(ErrorCode::DimensionMismatch, "local basis rows do not match its DOF list");
    for (std::size_t k = 0; k < b.size(); ++k, ++row) {
      for (std::size_t l = 0; l < b.dofs.size(); ++l) {
        const int g = b.dofs[l];
        if (system.constrained[static_cast<std::size_t>(g)]) continue;
        const double v = pou.values[i][static_cast<std::size_t>(g / comps)] * b.vectors(l, k);
        if (v != 0.0) t.push_back({row, g, v});
      }
      row_node.push_back(static_cast<int>(i));
      row_mode.push_back(static_cast<int>(k));
    }
  }
  const linalg::CsrMatrix candidates = linalg::CsrMatrix::from_triplets(row, n, t);

  const linalg::DenseMatrix gram = linalg::congruence(candidates, system.mass).to_dense();
  const linalg::PivotedCholesky pc = linalg::pivoted_cholesky(gram, rank_tol);

  CoarseSpace cs;
  if (pc.dependent.empty()) {
    cs.R = candidates;
    cs.row_node = std::move(row_node);
    cs.row_mode = std::move(row_mode);
    return cs;
  }
  if (policy == RankPolicy::Throw)
    throw Error(ErrorCode::RankDeficientCoarseSpace, "coarse space has rank " + std::to_string(pc.rank()) + " for " +
                                                         std::to_string(row) + " basis functions");
  std::vector<std::size_t> keep = pc.retained;
  std::sort(keep.begin(), keep.end());
  cs.R = candidates.select_rows(keep);
  for (const std::size_t r : keep) {
    cs.row_node.push_back(row_node[r]);
    cs.row_mode.push_back(row_mode[r]);
  }
  cs.dropped = pc.dependent;
  std::sort(cs.dropped.begin(), cs.dropped.end());
  return cs;
}

} // namespace pmsfem::gmsfem
