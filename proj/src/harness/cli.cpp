#include "pmsfem/harness/cli.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/harness/experiment.hpp"
#include "pmsfem/harness/export.hpp"
#include "pmsfem/mesher/mesh_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <ostream>

namespace pmsfem::harness {

namespace {

struct Flags {
  std::string config;
  std::string seed, out_dir, op, snapshots, oversample, buffer, nc;
  std::vector<std::string> files;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Configuration file (key = value)");
  cmd->add_option("--seed", f.seed, "RNG seed for randomized snapshots");
  cmd->add_option("--out-dir", f.out_dir, "Directory for output files");
  cmd->add_option("--operator", f.op, "laplace | elasticity | stokes");
  cmd->add_option("--snapshots", f.snapshots, "harmonic | spectral | randomized");
  cmd->add_option("--oversample", f.oversample, "Oversampling layers t");
  cmd->add_option("--buffer", f.buffer, "Randomized buffer p_bf");
  cmd->add_option("--nc", f.nc, "Basis functions per coarse node, comma separated");
}

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  const auto apply = [&](const char* key, const std::string& v) {
    if (!v.empty()) set_config_value(c, key, v);
  };
  apply("seed", f.seed);
  apply("out_dir", f.out_dir);
  apply("operator", f.op);
  apply("snapshots", f.snapshots);
  apply("oversample", f.oversample);
  apply("buffer", f.buffer);
  apply("nc", f.nc);
  validate(c);
  return c;
}

std::string output_path(const ExperimentConfig& c, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + c.out_dir + "': " + ec.message());
  return (std::filesystem::path(c.out_dir) / name).string();
}

void report_error(std::ostream& err, const std::string& code, const std::string& message, int exit_code) {
  const nlohmann::json j{{"error", code}, {"message", message}, {"exit_code", exit_code}};
  err << j.dump() << "\n";
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale finite elements in perforated domains", "pmsfem"};
  app.require_subcommand(1);
  Flags f;
  auto* mesh_cmd = app.add_subcommand("mesh", "Generate the fine mesh and save it");
  auto* fine_cmd = app.add_subcommand("solve-fine", "Reference fine-scale solve");
  auto* ms_cmd = app.add_subcommand("solve-gmsfem", "Multiscale solve for the last --nc value");
  auto* sweep_cmd = app.add_subcommand("sweep", "Error table over the --nc sweep");
  auto* cmp_cmd = app.add_subcommand("compare", "Relative errors of a solution file against a reference file");
  for (auto* cmd : {mesh_cmd, fine_cmd, ms_cmd, sweep_cmd, cmp_cmd}) add_common(cmd, f);
  cmp_cmd->add_option("files", f.files, "<solution> <reference>")->expected(2)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << app.help();
    report_error(err, "InvalidArguments", e.what(), 1);
    return 1;
  }

  try {
    ExperimentConfig config;
    try {
      config = build_config(f);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidConfig) err << app.help();
      throw;
    }
    Session session(config);

    if (mesh_cmd->parsed()) {
      const auto& m = session.mesh();
      mesher::save_mesh(m, output_path(config, "mesh.txt"));
      out << "nodes " << m.num_nodes() << " triangles " << m.num_triangles() << " min_angle "
          << format_number(mesher::mesh_min_angle_deg(m)) << "\n";
    } else if (fine_cmd->parsed()) {
      const auto& sol = session.fine_solution();
      save_solution(sol, output_path(config, "fine.sol"));
      export_vtk(sol, session.system(), session.mesh(), output_path(config, "fine.vtk"));
      out << "dofs " << session.system().num_dofs() << "\n";
    } else if (ms_cmd->parsed()) {
      if (config.nc_sweep.empty()) throw Error(ErrorCode::InvalidConfig, "solve-gmsfem needs an --nc value");
      const int nc = config.nc_sweep.back();
      const auto sol = session.solve(nc);
      save_solution(sol.fine, output_path(config, "gmsfem.sol"));
      export_vtk(sol.fine, session.system(), session.mesh(), output_path(config, "gmsfem.vtk"));
      out << "N_c " << nc << " dim " << sol.coefficients.size() + sol.coarse_pressure.size() << "\n";
    } else if (sweep_cmd->parsed()) {
      const ErrorReport report = session.sweep();
      export_csv(report, output_path(config, "sweep.csv"));
      out << format_csv(report);
      if (report.snapshot_fraction) out << "# snapshot_fraction " << format_number(*report.snapshot_fraction) << "\n";
    } else if (cmp_cmd->parsed()) {
      const fem::Solution approx = load_solution(f.files[0]);
      const fem::Solution reference = load_solution(f.files[1]);
      const RelativeErrors e = relative_errors(session.system(), approx, reference);
      out << "L2,H1\n" << format_number(e.l2) << "," << format_number(e.h1) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    const int code = is_validation_error(e.code()) ? 1 : 2;
    report_error(err, std::string(to_string(e.code())), e.detail(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what(), 2);
    return 2;
  }
}

} // namespace pmsfem::harness
