#include "pmsfem/gmsfem/offline.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/linalg/eigen.hpp"

#include <algorithm>
#include <cmath>

namespace pmsfem::gmsfem {

LocalForms local_forms(const LocalSpace& local, const SnapshotSet& snapshots) {
  LocalForms f;
  if (snapshots.kind == SnapshotKind::Spectral) {
    f.stiffness = local.stiffness.submatrix(local.free).to_dense();
    f.mass = local.mass.submatrix(local.free).to_dense();
  } else {
    if (snapshots.columns.rows() != local.size())
      throw Error(ErrorCode::DimensionMismatch, "snapshot rows do not match the local space");
    f.stiffness = linalg::congruence(snapshots.columns, local.stiffness);
    f.mass = linalg::congruence(snapshots.columns, local.mass);
  }
  return f;
}

OfflineSelection select_offline(const LocalForms& forms, std::size_t count, double rank_tol) {
  if (forms.stiffness.rows() != forms.mass.rows() || forms.stiffness.cols() != forms.mass.cols())
    throw Error(ErrorCode::DimensionMismatch, "local stiffness and mass forms differ in size");
  const linalg::GeneralizedEigen ge = linalg::eig_sym_generalized(forms.stiffness, forms.mass, rank_tol);
  OfflineSelection sel;
  sel.requested = count;
  const std::size_t keep = std::min(count, ge.values.size());
  sel.insufficient_rank = keep < count;
  sel.eigenvalues.assign(ge.values.begin(), ge.values.begin() + static_cast<std::ptrdiff_t>(keep));
  sel.coordinates = ge.vectors.leading_columns(keep);
  return sel;
}

LocalBasis LocalBasis::truncated(std::size_t count) const {
  LocalBasis b;
  b.dofs = dofs;
  const std::size_t keep = std::min(count, size());
  b.eigenvalues.assign(eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(keep));
  b.vectors = vectors.leading_columns(keep);
  b.insufficient_rank = insufficient_rank || keep < count;
  return b;
}

LocalBasis offline_basis(const LocalSpace& local, const SnapshotSet& snapshots, std::size_t count, double rank_tol) {
  const OfflineSelection sel = select_offline(local_forms(local, snapshots), count, rank_tol);
  LocalBasis basis;
  basis.dofs = local.dofs;
  basis.eigenvalues = sel.eigenvalues;
  basis.insufficient_rank = sel.insufficient_rank;
  const std::size_t m = sel.coordinates.cols();
  if (snapshots.kind == SnapshotKind::Spectral) {
    basis.vectors = linalg::DenseMatrix(local.size(), m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < local.free.size(); ++i)
        basis.vectors(static_cast<std::size_t>(local.free[i]), j) = sel.coordinates(i, j);
  } else {
    basis.vectors = linalg::multiply(snapshots.columns, sel.coordinates);
  }
  // Fix the sign so results do not depend on the eigensolver's arbitrary choice.
  for (std::size_t j = 0; j < m; ++j) {
    auto c = basis.vectors.col(j);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (std::abs(c[i]) > std::abs(c[arg])) arg = i;
    if (!c.empty() && c[arg] < 0.0)
      for (double& v : c) v = -v;
  }
  return basis;
}

} // namespace pmsfem::gmsfem
