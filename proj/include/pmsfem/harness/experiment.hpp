#pragma once

#include "pmsfem/gmsfem/coarse_space.hpp"
#include "pmsfem/harness/config.hpp"
#include "pmsfem/harness/norms.hpp"
#include "pmsfem/mesher/coarse_grid.hpp"
#include "pmsfem/mesher/fine_mesh.hpp"

#include <optional>

namespace pmsfem::harness {

struct ErrorRow {
  int nc = 0;
  std::size_t dim = 0;
  double l2 = 0.0;
  double h1 = 0.0;
};

struct Timings {
  double mesh = 0.0;
  double fine = 0.0;
  double offline = 0.0;
  double online = 0.0;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  std::size_t fine_dofs = 0;
  std::size_t fine_triangles = 0;
  std::optional<double> snapshot_fraction;  ///< randomized runs only
  std::uint64_t seed = 0;
  Timings timings;
};

/// Lazily built pipeline for one configuration. The mesh, the fine solve and
/// the offline decompositions are computed once and shared by every N_c.
class Session {
public:
  explicit Session(ExperimentConfig config);

  const ExperimentConfig& config() const noexcept { return config_; }
  const mesher::PerforatedDomain& domain();
  const mesher::CoarseGrid& coarse();
  const mesher::FineMesh& mesh();
  const fem::FineSystem& system();
  const fem::Solution& fine_solution();
  const gmsfem::PartitionOfUnity& partition_of_unity();
  /// Local spaces of the coarse neighborhoods ω_i.
  const std::vector<gmsfem::LocalSpace>& neighborhoods();

  /// Offline functions per coarse node for N_c basis functions per component.
  std::size_t functions_per_node(int nc) const;
  /// Offline bases holding at least functions_per_node(nc) functions where available.
  const std::vector<gmsfem::LocalBasis>& offline(int nc);

  /// Dependent rows (possible where a neighborhood has few unconstrained DOFs) are dropped by default.
  gmsfem::CoarseSpace coarse_space(int nc, gmsfem::RankPolicy policy = gmsfem::RankPolicy::Drop);
  gmsfem::CoarseSolution solve(int nc);
  RelativeErrors errors(const fem::Solution& approx);

  /// Randomized snapshot count over the full harmonic count; nullopt for other modes.
  std::optional<double> snapshot_fraction();
  ErrorReport sweep();

  const Timings& timings() const noexcept { return timings_; }

private:
  std::size_t randomized_target() const;

  ExperimentConfig config_;
  std::optional<mesher::PerforatedDomain> domain_;
  std::optional<mesher::CoarseGrid> coarse_;
  std::optional<mesher::FineMesh> mesh_;
  std::optional<fem::FineSystem> system_;
  std::optional<fem::Solution> fine_;
  std::optional<gmsfem::PartitionOfUnity> pou_;
  std::optional<std::vector<gmsfem::LocalSpace>> neighborhoods_;
  std::vector<gmsfem::LocalBasis> offline_;
  std::size_t offline_count_ = 0;
  std::size_t randomized_total_ = 0;
  std::size_t harmonic_total_ = 0;
  Timings timings_;
};

/// One sweep over config.nc_sweep. An empty sweep returns an empty report
/// without meshing or solving.
ErrorReport run_experiment(const ExperimentConfig& config);

} // namespace pmsfem::harness
