#pragma once

#include "pmsfem/harness/experiment.hpp"

#include <algorithm>
#include <cmath>

namespace fixture {

using pmsfem::fem::OperatorKind;
using pmsfem::gmsfem::SnapshotKind;

/// A coarse-ish configuration on one of the presets, cheap enough for unit tests.
inline pmsfem::harness::ExperimentConfig config(OperatorKind op, SnapshotKind snaps, std::vector<int> nc,
                                                const char* preset = "large", double h = 0.08) {
  pmsfem::harness::ExperimentConfig c;
  c.preset = preset;
  c.h_target = h;
  c.op.kind = op;
  c.snapshots = snaps;
  c.nc_sweep = std::move(nc);
  return c;
}

/// Relative energy-norm distance between two primary fields.
inline double energy_distance(const pmsfem::fem::FineSystem& sys, const pmsfem::linalg::Vector& a, const pmsfem::linalg::Vector& b) {
  pmsfem::linalg::Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(std::max(0.0, sys.stiffness.bilinear(d, d)));
}

} // namespace fixture
