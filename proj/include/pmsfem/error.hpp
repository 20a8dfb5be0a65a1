#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmsfem {

enum class ErrorCode {
  // geometry and meshing
  OverlappingInclusions,
  InclusionOutsideDomain,
  InvalidDomain,
  NonDivisibleH,
  RefinementFailure,
  MalformedMeshFile,
  // linear algebra
  IndexOutOfRange,
  NotPositiveDefinite,
  SingularMatrix,
  NonSymmetric,
  ZeroMassSpace,
  // finite elements
  DegenerateTriangle,
  InconsistentBC,
  // multiscale pipeline
  SingularLocalSystem,
  DimensionMismatch,
  RankDeficientCoarseSpace,
  SingularCoarseMatrix,
  CoarseInfSupFailure,
  // harness
  ZeroReferenceNorm,
  IoError,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad user input (as opposed to a numerical failure).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

} // namespace pmsfem
