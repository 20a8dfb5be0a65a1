#pragma once

#include "pmsfem/fem/assembly.hpp"
#include "pmsfem/gmsfem/snapshots.hpp"
#include "pmsfem/mesher/domain.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pmsfem::harness {

struct ExperimentConfig {
  // domain
  std::string preset = "large";          ///< ignored when `inclusions` is non-empty
  std::vector<mesher::Circle> inclusions;
  int polygon_segments = 0;              ///< 0 = preset default
  std::uint64_t domain_seed = 7;
  double coarse_h = 0.2;
  double h_target = 0.045;
  double min_angle = 20.0;
  // problem
  fem::Operator op;
  // multiscale
  gmsfem::SnapshotKind snapshots = gmsfem::SnapshotKind::Spectral;
  std::vector<int> nc_sweep{1, 2, 4, 8, 12, 16};
  int oversample = 2;
  int buffer = 4;
  std::uint64_t seed = 0;
  // output
  std::string out_dir = ".";
};

/// Parses the flat `key = value` format:
///
///   # comment
///   preset = large | small | none
///   inclusion = <x> <y> <r>        (repeatable; replaces the preset)
///   polygon_segments = <int>
///   domain_seed = <uint64>
///   coarse_h = <real>
///   h_target = <real>
///   min_angle = <real>
///   operator = laplace | elasticity | stokes
///   young = <real>   poisson = <real>   viscosity = <real>
///   snapshots = harmonic | spectral | randomized
///   nc = <int>, <int>, ...
///   oversample = <int>   buffer = <int>   seed = <uint64>
///   out_dir = <path>
///
/// Later keys override earlier ones. Throws InvalidConfig ("line N: ...").
ExperimentConfig parse_config(std::string_view text);

/// Throws IoError or InvalidConfig.
ExperimentConfig load_config(const std::string& path);

/// Cross-field checks. Throws InvalidConfig.
void validate(const ExperimentConfig& config);

/// Applies one key; shared by the file parser and the CLI flags. Throws InvalidConfig.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

} // namespace pmsfem::harness
