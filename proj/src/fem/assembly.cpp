#include "pmsfem/fem/assembly.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/linalg/solvers.hpp"

#include <cmath>
#include <string>

namespace pmsfem::fem {

std::string_view to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::Laplace: return "laplace";
    case OperatorKind::Elasticity: return "elasticity";
    case OperatorKind::Stokes: return "stokes";
  }
  return "unknown";
}

std::optional<OperatorKind> parse_operator(std::string_view name) noexcept {
  if (name == "laplace") return OperatorKind::Laplace;
  if (name == "elasticity") return OperatorKind::Elasticity;
  if (name == "stokes") return OperatorKind::Stokes;
  return std::nullopt;
}

double Operator::snapshot_mass_weight() const {
  if (kind != OperatorKind::Elasticity) return 1.0;
  const Lame l = lame();
  return l.lambda + 2.0 * l.mu;
}

void Operator::validate() const {
  if (kind == OperatorKind::Elasticity && !(young > 0.0 && poisson > 0.0 && poisson < 0.5))
    throw Error(ErrorCode::InvalidConfig, "elasticity needs E > 0 and 0 < nu < 0.5");
  if (kind == OperatorKind::Stokes && !(viscosity > 0.0)) throw Error(ErrorCode::InvalidConfig, "Stokes needs mu > 0");
}

CellMatrices cell_matrices(const Operator& op, const FeSpace& space, int cell, double mass_weight) {
  const auto& nodes = space.cell_nodes[static_cast<std::size_t>(cell)];
  const Triangle tri{space.node_coords[static_cast<std::size_t>(nodes[0])], space.node_coords[static_cast<std::size_t>(nodes[1])],
                     space.node_coords[static_cast<std::size_t>(nodes[2])]};
  CellMatrices cm;
  switch (op.kind) {
    case OperatorKind::Laplace: {
      cm.ndofs = 3;
      const auto k = element_laplace(tri);
      const auto m = element_mass(tri);
      for (std::size_t a = 0; a < 3; ++a) {
        cm.dofs[a] = nodes[a];
        for (std::size_t b = 0; b < 3; ++b) {
          cm.stiffness[a * 3 + b] = k(a, b);
          cm.mass[a * 3 + b] = mass_weight * m(a, b);
        }
      }
      break;
    }
    case OperatorKind::Elasticity: {
      cm.ndofs = 6;
      const auto k = element_elasticity(tri, op.lame());
      const auto m = element_mass(tri);
      for (std::size_t a = 0; a < 6; ++a) {
        cm.dofs[a] = space.dof(nodes[a / 2], static_cast<int>(a % 2));
        for (std::size_t b = 0; b < 6; ++b) {
          cm.stiffness[a * 6 + b] = k(a, b);
          cm.mass[a * 6 + b] = (a % 2 == b % 2) ? mass_weight * m(a / 2, b / 2) : 0.0;
        }
      }
      break;
    }
    case OperatorKind::Stokes: {
      cm.ndofs = 12;
      const auto el = element_stokes(tri);
      const auto m = element_p2_mass(tri);
      for (std::size_t a = 0; a < 12; ++a) {
        cm.dofs[a] = space.dof(nodes[a / 2], static_cast<int>(a % 2));
        for (std::size_t b = 0; b < 12; ++b) {
          cm.stiffness[a * 12 + b] = op.viscosity * el.velocity(a, b);
          cm.mass[a * 12 + b] = (a % 2 == b % 2) ? mass_weight * m(a / 2, b / 2) : 0.0;
        }
      }
      for (std::size_t i = 0; i < 3; ++i) {
        cm.pressure_nodes[i] = nodes[i];
        for (std::size_t a = 0; a < 12; ++a) cm.divergence[i * 12 + a] = el.divergence(i, a);
      }
      break;
    }
  }
  return cm;
}

linalg::Vector FineSystem::lifted_load() const {
  linalg::Vector r = stiffness * dirichlet;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = load[i] - r[i];
  return r;
}

FineSystem assemble(const Operator& op, const mesher::FineMesh& mesh, const BoundaryData& boundary) {
  op.validate();
  if (boundary.components != op.components())
    throw Error(ErrorCode::InconsistentBC, "boundary data has " + std::to_string(boundary.components) + " components, operator " +
                                               std::string(to_string(op.kind)) + " needs " + std::to_string(op.components()));
  FineSystem sys;
  sys.op = op;
  sys.space = make_space(mesh, op.element(), op.components());
  const FeSpace& space = sys.space;
  const int n = static_cast<int>(space.num_dofs());
  const int comps = space.components;
  const bool stokes = op.kind == OperatorKind::Stokes;

  std::vector<linalg::Triplet> kt, mt, bt, ct;
  sys.load.assign(static_cast<std::size_t>(n), 0.0);
  sys.cell_areas.resize(mesh.triangles.size());
  if (stokes) sys.pressure_weights.assign(mesh.nodes.size(), 0.0);

  for (int cell = 0; cell < static_cast<int>(mesh.triangles.size()); ++cell) {
    const CellMatrices cm = cell_matrices(op, space, cell);
    const double area = mesh.triangle_area(static_cast<std::size_t>(cell));
    sys.cell_areas[static_cast<std::size_t>(cell)] = area;
    for (int a = 0; a < cm.ndofs; ++a) {
      const int ga = cm.dofs[static_cast<std::size_t>(a)];
      for (int b = 0; b < cm.ndofs; ++b) {
        const int gb = cm.dofs[static_cast<std::size_t>(b)];
        if (ga > gb) continue;
        kt.push_back({ga, gb, cm.k(a, b)});
        if (cm.m(a, b) != 0.0) mt.push_back({ga, gb, cm.m(a, b)});
      }
      if (boundary.load) {
        double f = 0.0;
        for (int b = 0; b < cm.ndofs; ++b) {
          const int gb = cm.dofs[static_cast<std::size_t>(b)];
          if (cm.m(a, b) == 0.0) continue;
          f += cm.m(a, b) * boundary.load(space.node_coords[static_cast<std::size_t>(gb / comps)], gb % comps);
        }
        sys.load[static_cast<std::size_t>(ga)] += f;
      }
    }
    if (stokes) {
      for (std::size_t i = 0; i < 3; ++i) {
        const int q = cm.pressure_nodes[i];
        sys.pressure_weights[static_cast<std::size_t>(q)] += area / 3.0;
        for (int a = 0; a < cm.ndofs; ++a)
          bt.push_back({q, cm.dofs[static_cast<std::size_t>(a)], cm.divergence[i * 12 + static_cast<std::size_t>(a)]});
      }
      for (int a = 0; a < cm.ndofs; ++a) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) s += cm.divergence[i * 12 + static_cast<std::size_t>(a)];
        ct.push_back({cell, cm.dofs[static_cast<std::size_t>(a)], s});
      }
    }
  }
  sys.stiffness = linalg::SparseSym::from_triplets(n, kt);
  sys.mass = linalg::SparseSym::from_triplets(n, mt);
  if (stokes) {
    sys.divergence = linalg::CsrMatrix::from_triplets(static_cast<int>(mesh.nodes.size()), n, bt);
    sys.cell_divergence = linalg::CsrMatrix::from_triplets(static_cast<int>(mesh.triangles.size()), n, ct);
  }

  sys.constrained.assign(static_cast<std::size_t>(n), 0);
  sys.dirichlet.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t node = 0; node < space.num_nodes(); ++node) {
    const auto marker = space.node_markers[node];
    for (int c = 0; c < comps; ++c) {
      const auto d = static_cast<std::size_t>(space.dof(static_cast<int>(node), c));
      if (marker == mesher::NodeMarker::Outer && boundary.outer) {
        if (const auto v = boundary.outer(space.node_coords[node], c)) {
          sys.constrained[d] = 1;
          sys.dirichlet[d] = *v;
        }
      } else if (marker == mesher::NodeMarker::Perforation && op.perforation_bc == PerforationBc::Dirichlet) {
        sys.constrained[d] = 1;
      }
    }
  }
  for (int d = 0; d < n; ++d)
    if (!sys.constrained[static_cast<std::size_t>(d)]) sys.free_dofs.push_back(d);
  return sys;
}

Solution fine_solve(const FineSystem& sys) {
  Solution sol;
  sol.kind = sys.op.kind;
  sol.u = sys.dirichlet;
  const linalg::Vector rhs_full = sys.lifted_load();
  const std::size_t nf = sys.free_dofs.size();

  if (sys.op.kind != OperatorKind::Stokes) {
    const linalg::SparseSym a = sys.stiffness.submatrix(sys.free_dofs);
    linalg::Vector b(nf);
    for (std::size_t i = 0; i < nf; ++i) b[i] = rhs_full[static_cast<std::size_t>(sys.free_dofs[i])];
    linalg::Vector x;
    try {
      x = linalg::SpdSolver(a).solve(b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotPositiveDefinite) throw Error(ErrorCode::SingularMatrix, "fine system is singular: " + e.detail());
      throw;
    }
    const linalg::Vector ax = a * x;
    double res = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < nf; ++i) {
      res += (ax[i] - b[i]) * (ax[i] - b[i]);
      nb += b[i] * b[i];
    }
    if (!(std::sqrt(res) <= 1e-9 * std::max(std::sqrt(nb), 1e-300)) && nb > 0.0)
      throw Error(ErrorCode::SingularMatrix, "fine solve residual too large");
    for (std::size_t i = 0; i < nf; ++i) sol.u[static_cast<std::size_t>(sys.free_dofs[i])] = x[i];
    return sol;
  }

  // [A_ff  -B_fᵀ  0; -B_f  0  w; 0  wᵀ  0] with the mean-zero pressure multiplier last.
  const std::size_t np = sys.num_pressure();
  const int n = static_cast<int>(nf + np + 1);
  std::vector<int> free_index(sys.num_dofs(), -1);
  for (std::size_t i = 0; i < nf; ++i) free_index[static_cast<std::size_t>(sys.free_dofs[i])] = static_cast<int>(i);
  std::vector<linalg::Triplet> t;
  const auto& A = sys.stiffness;
  for (int r = 0; r < A.size(); ++r) {
    const int fr = free_index[static_cast<std::size_t>(r)];
    if (fr < 0) continue;
    for (int p = A.row_ptr()[static_cast<std::size_t>(r)]; p < A.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p) {
      const int fc = free_index[static_cast<std::size_t>(A.col_idx()[static_cast<std::size_t>(p)])];
      if (fc >= 0) t.push_back({fr, fc, A.values()[static_cast<std::size_t>(p)]});
    }
  }
  linalg::Vector rhs(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < nf; ++i) rhs[i] = rhs_full[static_cast<std::size_t>(sys.free_dofs[i])];
  const auto& B = sys.divergence;
  for (int q = 0; q < B.rows(); ++q) {
    const int row = static_cast<int>(nf) + q;
    for (int p = B.row_ptr()[static_cast<std::size_t>(q)]; p < B.row_ptr()[static_cast<std::size_t>(q) + 1]; ++p) {
      const int col = B.col_idx()[static_cast<std::size_t>(p)];
      const double v = B.values()[static_cast<std::size_t>(p)];
      const int fc = free_index[static_cast<std::size_t>(col)];
      if (fc >= 0)
        t.push_back({fc, row, -v});
      else
        rhs[static_cast<std::size_t>(row)] += v * sys.dirichlet[static_cast<std::size_t>(col)];
    }
    t.push_back({row, n - 1, sys.pressure_weights[static_cast<std::size_t>(q)]});
  }
  const linalg::SparseSym K = linalg::SparseSym::from_triplets(n, t);
  const linalg::Vector x = linalg::IndefiniteSolver(K).solve(rhs);
  for (std::size_t i = 0; i < nf; ++i) sol.u[static_cast<std::size_t>(sys.free_dofs[i])] = x[i];
  sol.pressure.assign(x.begin() + static_cast<std::ptrdiff_t>(nf), x.begin() + static_cast<std::ptrdiff_t>(nf + np));
  return sol;
}

double pressure_mean(const FineSystem& sys, const Solution& sol) {
  double num = 0.0, den = 0.0;
  if (sol.pressure_per_cell) {
    for (std::size_t t = 0; t < sol.pressure.size(); ++t) {
      num += sys.cell_areas[t] * sol.pressure[t];
      den += sys.cell_areas[t];
    }
  } else {
    for (std::size_t i = 0; i < sol.pressure.size(); ++i) {
      num += sys.pressure_weights[i] * sol.pressure[i];
      den += sys.pressure_weights[i];
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

} // namespace pmsfem::fem
