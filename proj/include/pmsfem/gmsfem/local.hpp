#pragma once

#include "pmsfem/fem/assembly.hpp"
#include "pmsfem/mesher/neighborhood.hpp"

#include <vector>

namespace pmsfem::gmsfem {

/// Finite element space restricted to a fine-mesh patch, with the patch
/// operator and snapshot mass assembled over the patch elements only.
struct LocalSpace {
  mesher::Neighborhood patch;
  std::vector<int> dofs;         ///< global DOFs touching the patch, ascending; local index = position
  std::vector<int> boundary;     ///< local indices on the patch boundary (no perforation)
  std::vector<int> perforation;  ///< local indices on hole boundaries
  std::vector<int> interior;     ///< local indices solved for in harmonic extensions
  std::vector<int> free;         ///< local indices except Dirichlet perforation DOFs
  linalg::SparseSym stiffness;
  linalg::SparseSym mass;        ///< weighted by the operator's snapshot mass weight
  // Stokes only
  std::vector<int> pressure_nodes;   ///< patch vertices; local pressure index = position
  linalg::CsrMatrix divergence;      ///< local pressure x local velocity, ∫ q div v
  linalg::Vector pressure_weights;

  std::size_t size() const { return dofs.size(); }
  /// Local index of a global DOF, or -1.
  int local_index(int global_dof) const;
};

LocalSpace build_local_space(const fem::FineSystem& system, const mesher::Neighborhood& patch);

/// Harmonic extension into the patch: the operator's homogeneous equation is
/// solved with the given values on the boundary DOFs (one column per extension)
/// and zero Dirichlet data on perforations. For Stokes the boundary data is
/// first projected to zero net flux through the patch boundary.
/// Returns local-DOF columns. Throws SingularLocalSystem.
linalg::DenseMatrix harmonic_extension(const LocalSpace& local, const fem::Operator& op, const linalg::DenseMatrix& boundary_values);

} // namespace pmsfem::gmsfem
