#include "pmsfem/error.hpp"

namespace pmsfem {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::OverlappingInclusions: return "OverlappingInclusions";
  case ErrorCode::InclusionOutsideDomain: return "InclusionOutsideDomain";
  case ErrorCode::InvalidDomain: return "InvalidDomain";
  case ErrorCode::NonDivisibleH: return "NonDivisibleH";
  case ErrorCode::RefinementFailure: return "RefinementFailure";
  case ErrorCode::MalformedMeshFile: return "MalformedMeshFile";
  case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
  case ErrorCode::SingularMatrix: return "SingularMatrix";
  case ErrorCode::NonSymmetric: return "NonSymmetric";
  case ErrorCode::ZeroMassSpace: return "ZeroMassSpace";
  case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
  case ErrorCode::InconsistentBC: return "InconsistentBC";
  case ErrorCode::SingularLocalSystem: return "SingularLocalSystem";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::RankDeficientCoarseSpace: return "RankDeficientCoarseSpace";
  case ErrorCode::SingularCoarseMatrix: return "SingularCoarseMatrix";
  case ErrorCode::CoarseInfSupFailure: return "CoarseInfSupFailure";
  case ErrorCode::ZeroReferenceNorm: return "ZeroReferenceNorm";
  case ErrorCode::IoError: return "IoError";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::OverlappingInclusions:
  case ErrorCode::InclusionOutsideDomain:
  case ErrorCode::InvalidDomain:
  case ErrorCode::NonDivisibleH:
  case ErrorCode::MalformedMeshFile:
  case ErrorCode::InconsistentBC:
  case ErrorCode::InvalidConfig:
  case ErrorCode::IoError:
    return true;
  default:
    return false;
  }
}

} // namespace pmsfem
