#pragma once

#include "pmsfem/gmsfem/local.hpp"

#include <string_view>
#include <optional>

namespace pmsfem::gmsfem {

enum class SnapshotKind { Harmonic, Spectral, Randomized };

std::string_view to_string(SnapshotKind kind) noexcept;
std::optional<SnapshotKind> parse_snapshots(std::string_view name) noexcept;

/// Snapshot vectors of one neighborhood, as columns over the local DOFs of ω_i.
/// The spectral set is the identity on the free local DOFs and is kept implicit.
struct SnapshotSet {
  SnapshotKind kind = SnapshotKind::Harmonic;
  linalg::DenseMatrix columns;   ///< empty for spectral
  std::size_t local_solves = 0;  ///< harmonic extensions computed to produce the set
};

/// One harmonic extension per boundary DOF of the neighborhood.
SnapshotSet harmonic_snapshots(const LocalSpace& local, const fem::Operator& op);

SnapshotSet spectral_snapshots(const LocalSpace& local);

/// Number of snapshot vectors in the set.
std::size_t snapshot_count(const LocalSpace& local, const SnapshotSet& set);

} // namespace pmsfem::gmsfem
