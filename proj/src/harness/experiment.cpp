#include "pmsfem/harness/experiment.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/harness/presets.hpp"
#include "pmsfem/mesher/neighborhood.hpp"
#include "pmsfem/randomized/randomized.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace pmsfem::harness {

namespace {

class Stopwatch {
public:
  explicit Stopwatch(double& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() { sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

const mesher::Rect kUnitSquare{{0.0, 0.0}, {1.0, 1.0}};

} // namespace

Session::Session(ExperimentConfig config) : config_(std::move(config)) { validate(config_); }

const mesher::PerforatedDomain& Session::domain() {
  if (!domain_) {
    const int segments_override = config_.polygon_segments;
    if (!config_.inclusions.empty()) {
      domain_ = mesher::build_domain(kUnitSquare, config_.inclusions, segments_override > 0 ? segments_override : 16);
    } else {
      DomainPreset preset = *find_preset(config_.preset);
      if (segments_override > 0) preset.polygon_segments = segments_override;
      domain_ = sample_domain(preset, kUnitSquare, config_.coarse_h, config_.domain_seed);
    }
  }
  return *domain_;
}

const mesher::CoarseGrid& Session::coarse() {
  if (!coarse_) coarse_ = mesher::build_coarse_grid(domain(), config_.coarse_h);
  return *coarse_;
}

const mesher::FineMesh& Session::mesh() {
  if (!mesh_) {
    const auto& d = domain();
    const auto& g = coarse();
    Stopwatch sw(timings_.mesh);
    mesher::MeshOptions opts;
    opts.h_target = config_.h_target;
    opts.min_angle_deg = config_.min_angle;
    mesh_ = mesher::generate_fine_mesh(d, g, opts);
  }
  return *mesh_;
}

const fem::FineSystem& Session::system() {
  if (!system_) {
    const auto& m = mesh();
    Stopwatch sw(timings_.fine);
    system_ = fem::assemble(config_.op, m, benchmark_boundary(config_.op.kind, kUnitSquare));
  }
  return *system_;
}

const fem::Solution& Session::fine_solution() {
  if (!fine_) {
    const auto& s = system();
    Stopwatch sw(timings_.fine);
    fine_ = fem::fine_solve(s);
  }
  return *fine_;
}

const gmsfem::PartitionOfUnity& Session::partition_of_unity() {
  if (!pou_) pou_ = gmsfem::build_partition_of_unity(coarse(), system().space);
  return *pou_;
}

const std::vector<gmsfem::LocalSpace>& Session::neighborhoods() {
  if (!neighborhoods_) {
    const auto& g = coarse();
    const auto& m = mesh();
    const auto& s = system();
    Stopwatch sw(timings_.offline);
    std::vector<gmsfem::LocalSpace> spaces;
    spaces.reserve(g.nodes.size());
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i)
      spaces.push_back(gmsfem::build_local_space(s, mesher::build_neighborhood(g, m, i)));
    neighborhoods_ = std::move(spaces);
  }
  return *neighborhoods_;
}

std::size_t Session::functions_per_node(int nc) const {
  return static_cast<std::size_t>(nc) * static_cast<std::size_t>(config_.op.components());
}

std::size_t Session::randomized_target() const {
  const int max_nc = config_.nc_sweep.empty() ? 1 : *std::max_element(config_.nc_sweep.begin(), config_.nc_sweep.end());
  return static_cast<std::size_t>(max_nc);
}

const std::vector<gmsfem::LocalBasis>& Session::offline(int nc) {
  const std::size_t want = functions_per_node(nc);
  if (!offline_.empty() && want <= offline_count_) return offline_;

  // Compute once for the whole sweep so every N_c truncates the same decomposition.
  const int sweep_max = config_.nc_sweep.empty() ? nc : std::max(nc, *std::max_element(config_.nc_sweep.begin(), config_.nc_sweep.end()));
  const std::size_t count = std::max(want, functions_per_node(sweep_max));
  const auto& spaces = neighborhoods();
  const auto& g = coarse();
  const auto& m = mesh();
  const auto& s = system();
  Stopwatch sw(timings_.offline);

  randomized::RandomizedConfig rc;
  rc.target = std::max(randomized_target(), static_cast<std::size_t>(nc));
  rc.buffer = static_cast<std::size_t>(config_.buffer);
  rc.oversampling_layers = config_.oversample;
  rc.seed = config_.seed;

  std::vector<gmsfem::LocalBasis> bases;
  bases.reserve(spaces.size());
  randomized_total_ = harmonic_total_ = 0;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    const auto& local = spaces[i];
    gmsfem::SnapshotSet snaps;
    std::size_t full_count = local.boundary.size();
    try {
      switch (config_.snapshots) {
        case gmsfem::SnapshotKind::Harmonic: snaps = gmsfem::harmonic_snapshots(local, config_.op); break;
        case gmsfem::SnapshotKind::Spectral: snaps = gmsfem::spectral_snapshots(local); break;
        case gmsfem::SnapshotKind::Randomized: {
          const auto plus = gmsfem::build_local_space(s, mesher::oversample(local.patch, m, config_.oversample));
          snaps = randomized::randomized_snapshots(local, plus, config_.op, rc);
          full_count = plus.boundary.size();  // the full set lives on the same region
          break;
        }
      }
      bases.push_back(gmsfem::offline_basis(local, snaps, count));
    } catch (const Error& e) {
      throw Error(e.code(), "offline stage, coarse node " + std::to_string(i) + " at (" + std::to_string(g.nodes[i].x) + ", " +
                                std::to_string(g.nodes[i].y) + "): " + e.detail());
    }
    harmonic_total_ += full_count;
    randomized_total_ += gmsfem::snapshot_count(local, snaps);
  }
  offline_ = std::move(bases);
  offline_count_ = count;
  return offline_;
}

gmsfem::CoarseSpace Session::coarse_space(int nc, gmsfem::RankPolicy policy) {
  const auto& all = offline(nc);
  const std::size_t want = functions_per_node(nc);
  std::vector<gmsfem::LocalBasis> bases;
  bases.reserve(all.size());
  for (const auto& b : all) bases.push_back(b.truncated(want));
  return gmsfem::assemble_coarse_space(system(), partition_of_unity(), bases, policy);
}

gmsfem::CoarseSolution Session::solve(int nc) {
  const gmsfem::CoarseSpace cs = coarse_space(nc);
  Stopwatch sw(timings_.online);
  if (config_.op.kind == fem::OperatorKind::Stokes) return gmsfem::coarse_solve_stokes(cs, system(), mesh(), coarse());
  return gmsfem::coarse_solve(cs, system());
}

RelativeErrors Session::errors(const fem::Solution& approx) { return relative_errors(system(), approx, fine_solution()); }

std::optional<double> Session::snapshot_fraction() {
  if (config_.snapshots != gmsfem::SnapshotKind::Randomized) return std::nullopt;
  if (offline_.empty()) offline(config_.nc_sweep.empty() ? 1 : config_.nc_sweep.front());
  return randomized::snapshot_fraction(randomized_total_, harmonic_total_);
}

ErrorReport Session::sweep() {
  ErrorReport report;
  report.seed = config_.seed;
  if (config_.nc_sweep.empty()) return report;
  report.fine_dofs = system().num_dofs();
  report.fine_triangles = mesh().num_triangles();
  fine_solution();
  for (const int nc : config_.nc_sweep) {
    const gmsfem::CoarseSolution sol = solve(nc);
    const RelativeErrors e = errors(sol.fine);
    report.rows.push_back({nc, sol.coefficients.size() + sol.coarse_pressure.size(), e.l2, e.h1});
  }
  report.snapshot_fraction = snapshot_fraction();
  report.timings = timings_;
  return report;
}

ErrorReport run_experiment(const ExperimentConfig& config) {
  Session session(config);
  return session.sweep();
}

} // namespace pmsfem::harness
