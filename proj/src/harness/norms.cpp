#include "pmsfem/harness/norms.hpp"

#include "pmsfem/error.hpp"

#include <cmath>

namespace pmsfem::harness {

RelativeErrors relative_errors(const fem::FineSystem& system, const fem::Solution& approx, const fem::Solution& reference) {
  const std::size_t n = system.num_dofs();
  if (approx.u.size() != n || reference.u.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "solutions do not live on the system's finite element space");
  linalg::Vector diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = reference.u[i] - approx.u[i];

  const double ref_l2 = system.mass.bilinear(reference.u, reference.u);
  const double ref_h1 = system.stiffness.bilinear(reference.u, reference.u);
  if (!(ref_l2 > 0.0) || !(ref_h1 > 0.0)) throw Error(ErrorCode::ZeroReferenceNorm, "reference solution has zero norm");
  RelativeErrors e;
  e.l2 = std::sqrt(std::max(system.mass.bilinear(diff, diff), 0.0) / ref_l2);
  e.h1 = std::sqrt(std::max(system.stiffness.bilinear(diff, diff), 0.0) / ref_h1);
  return e;
}

} // namespace pmsfem::harness
