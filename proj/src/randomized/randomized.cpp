#include "pmsfem/randomized/randomized.hpp"

#include "pmsfem/error.hpp"

#include <random>

namespace pmsfem::randomized {

linalg::DenseMatrix random_boundary_vectors(std::size_t boundary_dofs, std::size_t count, std::uint64_t seed, int neighborhood) {
  std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(neighborhood));
  std::normal_distribution<double> normal(0.0, 1.0);
  linalg::DenseMatrix g(boundary_dofs, count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < boundary_dofs; ++i) g(i, j) = normal(rng);
  return g;
}

std::size_t randomized_snapshot_count(const fem::Operator& op, const RandomizedConfig& config) {
  return (config.target + config.buffer + 1) * static_cast<std::size_t>(op.components());
}

gmsfem::SnapshotSet randomized_snapshots(const gmsfem::LocalSpace& core, const gmsfem::LocalSpace& oversampled,
                                         const fem::Operator& op, const RandomizedConfig& config) {
  if (config.oversampling_layers < 0) throw Error(ErrorCode::InvalidConfig, "oversampling layers must be >= 0");
  const auto comps = static_cast<std::size_t>(op.components());
  const std::size_t nb = oversampled.boundary.size();
  const std::size_t random = (config.target + config.buffer) * comps;

  linalg::DenseMatrix data(nb, random + comps, 0.0);
  const linalg::DenseMatrix g = random_boundary_vectors(nb, random, config.seed, oversampled.patch.coarse_node);
  for (std::size_t j = 0; j < random; ++j)
    for (std::size_t i = 0; i < nb; ++i) data(i, j) = g(i, j);
  // Unit data in each component.
  for (std::size_t i = 0; i < nb; ++i) {
    const auto c = static_cast<std::size_t>(oversampled.dofs[static_cast<std::size_t>(oversampled.boundary[i])]) % comps;
    data(i, random + c) = 1.0;
  }
  const linalg::DenseMatrix ext = gmsfem::harmonic_extension(oversampled, op, data);

  gmsfem::SnapshotSet set;
  set.kind = gmsfem::SnapshotKind::Randomized;
  set.local_solves = data.cols();
  set.columns = linalg::DenseMatrix(core.size(), data.cols(), 0.0);
  for (std::size_t l = 0; l < core.size(); ++l) {
    const int o = oversampled.local_index(core.dofs[l]);
    if (o < 0) throw Error(ErrorCode::DimensionMismatch, "oversampled patch does not contain the neighborhood");
    for (std::size_t j = 0; j < data.cols(); ++j) set.columns(l, j) = ext(static_cast<std::size_t>(o), j);
  }
  return set;
}

double snapshot_fraction(std::size_t randomized_total, std::size_t harmonic_total) {
  if (harmonic_total == 0) throw Error(ErrorCode::InvalidConfig, "no harmonic snapshots to compare against");
  return static_cast<double>(randomized_total) / static_cast<double>(harmonic_total);
}

} // namespace pmsfem::randomized
