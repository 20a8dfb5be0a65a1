#pragma once

#include "pmsfem/fem/assembly.hpp"

namespace pmsfem::harness {

struct RelativeErrors {
  double l2 = 0.0;  ///< mass norm
  double h1 = 0.0;  ///< energy norm of the operator
};

/// ‖u_ref - u‖ / ‖u_ref‖ in the fine mass and energy forms of the primary
/// field (velocity for Stokes). Throws ZeroReferenceNorm or DimensionMismatch.
RelativeErrors relative_errors(const fem::FineSystem& system, const fem::Solution& approx, const fem::Solution& reference);

} // namespace pmsfem::harness
