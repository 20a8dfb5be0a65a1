#include "pmsfem/gmsfem/snapshots.hpp"

namespace pmsfem::gmsfem {

std::string_view to_string(SnapshotKind kind) noexcept {
  switch (kind) {
    case SnapshotKind::Harmonic: return "harmonic";
    case SnapshotKind::Spectral: return "spectral";
    case SnapshotKind::Randomized: return "randomized";
  }
  return "unknown";
}

std::optional<SnapshotKind> parse_snapshots(std::string_view name) noexcept {
  if (name == "harmonic") return SnapshotKind::Harmonic;
  if (name == "spectral") return SnapshotKind::Spectral;
  if (name == "randomized") return SnapshotKind::Randomized;
  return std::nullopt;
}

SnapshotSet harmonic_snapshots(const LocalSpace& local, const fem::Operator& op) {
  const std::size_t nb = local.boundary.size();
  SnapshotSet set;
  set.kind = SnapshotKind::Harmonic;
  set.columns = harmonic_extension(local, op, linalg::DenseMatrix::identity(nb));
  set.local_solves = nb;
  return set;
}

SnapshotSet spectral_snapshots(const LocalSpace&) {
  SnapshotSet set;
  set.kind = SnapshotKind::Spectral;
  return set;
}

std::size_t snapshot_count(const LocalSpace& local, const SnapshotSet& set) {
  return set.kind == SnapshotKind::Spectral ? local.free.size() : set.columns.cols();
}

} // namespace pmsfem::gmsfem
