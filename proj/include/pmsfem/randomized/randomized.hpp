#pragma once

#include "pmsfem/gmsfem/snapshots.hpp"

#include <cstdint>

namespace pmsfem::randomized {

struct RandomizedConfig {
  std::size_t target = 16;     ///< basis functions wanted per component
  std::size_t buffer = 4;      ///< extra random vectors per component
  int oversampling_layers = 2; ///< fine-element layers added around ω_i
  std::uint64_t seed = 0;
};

/// `count` columns of i.i.d. standard normal values, one row per boundary DOF.
/// The stream depends only on (seed, neighborhood).
linalg::DenseMatrix random_boundary_vectors(std::size_t boundary_dofs, std::size_t count, std::uint64_t seed, int neighborhood);

/// Harmonic extensions of random boundary data (plus one constant per
/// component) computed on the oversampled patch and restricted to ω_i.
/// `core` is the local space of ω_i and `oversampled` that of ω_i⁺.
gmsfem::SnapshotSet randomized_snapshots(const gmsfem::LocalSpace& core, const gmsfem::LocalSpace& oversampled,
                                         const fem::Operator& op, const RandomizedConfig& config);

/// Number of randomized snapshots per neighborhood.
std::size_t randomized_snapshot_count(const fem::Operator& op, const RandomizedConfig& config);

/// Snapshots computed relative to the full harmonic snapshot count on the
/// same regions (Σ_i |boundary DOFs of ω_i⁺|).
double snapshot_fraction(std::size_t randomized_total, std::size_t harmonic_total);

} // namespace pmsfem::randomized
