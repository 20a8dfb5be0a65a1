#pragma once

#include "pmsfem/fem/elements.hpp"
#include "pmsfem/fem/space.hpp"
#include "pmsfem/linalg/sparse.hpp"

#include <functional>
#include <optional>
#include <string_view>

namespace pmsfem::fem {

enum class OperatorKind { Laplace, Elasticity, Stokes };
enum class PerforationBc { Dirichlet, Neumann };

std::string_view to_string(OperatorKind kind) noexcept;
std::optional<OperatorKind> parse_operator(std::string_view name) noexcept;

struct Operator {
  OperatorKind kind = OperatorKind::Laplace;
  double young = 1e9;      ///< elasticity
  double poisson = 0.22;   ///< elasticity
  double viscosity = 1.0;  ///< Stokes
  PerforationBc perforation_bc = PerforationBc::Dirichlet;

  int components() const { return kind == OperatorKind::Laplace ? 1 : 2; }
  ElementKind element() const { return kind == OperatorKind::Stokes ? ElementKind::P2 : ElementKind::P1; }
  Lame lame() const { return Lame::from_young(young, poisson); }
  /// Weight of the mass form used by the local spectral problem: λ + 2μ for elasticity, 1 otherwise.
  double snapshot_mass_weight() const;
  /// Throws InvalidConfig for nonphysical parameters.
  void validate() const;
};

struct BoundaryData {
  int components = 1;
  /// Dirichlet value of a component at an outer-boundary node; nullopt leaves it natural (traction free).
  std::function<std::optional<double>(mesher::Vec2, int)> outer;
  /// Body force; empty means zero.
  std::function<double(mesher::Vec2, int)> load;
};

/// Element contributions of one fine cell in global DOF numbering.
struct CellMatrices {
  int ndofs = 0;
  std::array<int, 12> dofs{};
  std::array<double, 144> stiffness{};  ///< ndofs x ndofs, row-major
  std::array<double, 144> mass{};       ///< ndofs x ndofs, row-major
  std::array<int, 3> pressure_nodes{};  ///< Stokes: P1 pressure nodes (mesh vertices)
  std::array<double, 36> divergence{};  ///< Stokes: 3 x ndofs, ∫ q_i div φ_j

  double k(int i, int j) const { return stiffness[static_cast<std::size_t>(i * ndofs + j)]; }
  double m(int i, int j) const { return mass[static_cast<std::size_t>(i * ndofs + j)]; }
};

CellMatrices cell_matrices(const Operator& op, const FeSpace& space, int cell, double mass_weight = 1.0);

struct FineSystem {
  Operator op;
  FeSpace space;
  linalg::SparseSym stiffness;         ///< full operator matrix, before boundary conditions
  linalg::SparseSym mass;              ///< unweighted L2 mass of the primary field
  linalg::CsrMatrix divergence;        ///< Stokes: P1 pressure x velocity, ∫ q div v
  linalg::CsrMatrix cell_divergence;   ///< Stokes: fine cell x velocity, ∫_T div v
  linalg::Vector load;
  std::vector<char> constrained;
  linalg::Vector dirichlet;            ///< prescribed values on constrained DOFs, zero elsewhere
  std::vector<int> free_dofs;
  linalg::Vector pressure_weights;     ///< Stokes: ∫ q_i
  linalg::Vector cell_areas;

  std::size_t num_dofs() const { return space.num_dofs(); }
  std::size_t num_pressure() const { return pressure_weights.size(); }
  /// F - A g: the load seen by the free DOFs after lifting the Dirichlet data.
  linalg::Vector lifted_load() const;
};

/// Throws InconsistentBC when the data does not match the operator's field.
FineSystem assemble(const Operator& op, const mesher::FineMesh& mesh, const BoundaryData& boundary);

struct Solution {
  OperatorKind kind = OperatorKind::Laplace;
  linalg::Vector u;                ///< every DOF of the primary field
  linalg::Vector pressure;         ///< Stokes only
  bool pressure_per_cell = false;  ///< piecewise constant on fine cells instead of P1 at vertices
};

/// Reference fine-scale solve. Throws SingularMatrix.
Solution fine_solve(const FineSystem& system);

/// Mean of the pressure over the meshed domain.
double pressure_mean(const FineSystem& system, const Solution& solution);

} // namespace pmsfem::fem
