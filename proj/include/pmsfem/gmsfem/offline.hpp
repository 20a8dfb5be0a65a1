#pragma once

#include "pmsfem/gmsfem/snapshots.hpp"

namespace pmsfem::gmsfem {

/// Reduced local forms Ψᵀ A Ψ and Ψᵀ S Ψ on the snapshot space.
struct LocalForms {
  linalg::DenseMatrix stiffness;
  linalg::DenseMatrix mass;
};

LocalForms local_forms(const LocalSpace& local, const SnapshotSet& snapshots);

struct OfflineSelection {
  linalg::Vector eigenvalues;      ///< ascending, one per retained mode
  linalg::DenseMatrix coordinates; ///< snapshot-space coordinates, S-orthonormal columns
  std::size_t requested = 0;
  bool insufficient_rank = false;  ///< fewer than `requested` modes exist in the mass range
};

/// The `count` smallest modes of stiffness v = λ mass v, restricted to the
/// numerical range of the mass form (relative cutoff `rank_tol`).
OfflineSelection select_offline(const LocalForms& forms, std::size_t count, double rank_tol = 1e-10);

/// Offline basis functions of one neighborhood as local-DOF columns.
struct LocalBasis {
  std::vector<int> dofs;         ///< global DOFs of the columns' rows
  linalg::Vector eigenvalues;
  linalg::DenseMatrix vectors;   ///< S-orthonormal; largest-magnitude entry of each column is positive
  bool insufficient_rank = false;

  std::size_t size() const noexcept { return vectors.cols(); }
  /// Leading `count` functions (all when fewer exist).
  LocalBasis truncated(std::size_t count) const;
};

LocalBasis offline_basis(const LocalSpace& local, const SnapshotSet& snapshots, std::size_t count, double rank_tol = 1e-10);

} // namespace pmsfem::gmsfem
