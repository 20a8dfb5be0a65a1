#include "pmsfem/gmsfem/local.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/linalg/solvers.hpp"

#include <algorithm>
#include <memory>
#include <string>

namespace pmsfem::gmsfem {

int LocalSpace::local_index(int global_dof) const {
  const auto it = std::lower_bound(dofs.begin(), dofs.end(), global_dof);
  return it != dofs.end() && *it == global_dof ? static_cast<int>(it - dofs.begin()) : -1;
}

LocalSpace build_local_space(const fem::FineSystem& system, const mesher::Neighborhood& patch) {
  const fem::FeSpace& space = system.space;
  const fem::Operator& op = system.op;
  const int comps = space.components;
  LocalSpace loc;
  loc.patch = patch;

  std::vector<int> nodes;
  for (const int cell : patch.elements) {
    const auto& cn = space.cell_nodes[static_cast<std::size_t>(cell)];
    for (int k = 0; k < space.nodes_per_cell(); ++k) nodes.push_back(cn[static_cast<std::size_t>(k)]);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (const int node : nodes)
    for (int c = 0; c < comps; ++c) loc.dofs.push_back(space.dof(node, c));

  // Node classes, then expanded to component DOFs.
  std::vector<int> boundary_nodes = patch.boundary_nodes;
  if (space.kind == fem::ElementKind::P2)
    for (const auto& e : patch.boundary_edges) boundary_nodes.push_back(space.edge_node(e[0], e[1]));
  std::sort(boundary_nodes.begin(), boundary_nodes.end());
  const bool dirichlet_holes = op.perforation_bc == fem::PerforationBc::Dirichlet;
  for (std::size_t l = 0; l < loc.dofs.size(); ++l) {
    const int node = loc.dofs[l] / comps;
    const int li = static_cast<int>(l);
    const bool on_boundary = std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), node);
    const bool on_hole = space.node_markers[static_cast<std::size_t>(node)] == mesher::NodeMarker::Perforation;
    if (on_hole) loc.perforation.push_back(li);
    if (on_boundary && !on_hole) loc.boundary.push_back(li);
    if (!on_boundary && !(on_hole && dirichlet_holes)) loc.interior.push_back(li);
    if (!(on_hole && dirichlet_holes)) loc.free.push_back(li);
  }

  const bool stokes = op.kind == fem::OperatorKind::Stokes;
  if (stokes) {
    loc.pressure_nodes = patch.nodes;
    loc.pressure_weights.assign(loc.pressure_nodes.size(), 0.0);
  }
  const auto pressure_index = [&](int vertex) {
    const auto it = std::lower_bound(loc.pressure_nodes.begin(), loc.pressure_nodes.end(), vertex);
    return static_cast<int>(it - loc.pressure_nodes.begin());
  };

  const double weight = op.snapshot_mass_weight();
  std::vector<linalg::Triplet> kt, mt, bt;
  for (const int cell : patch.elements) {
    const fem::CellMatrices cm = fem::cell_matrices(op, space, cell, weight);
    std::array<int, 12> ld{};
    for (int a = 0; a < cm.ndofs; ++a) ld[static_cast<std::size_t>(a)] = loc.local_index(cm.dofs[static_cast<std::size_t>(a)]);
    for (int a = 0; a < cm.ndofs; ++a)
      for (int b = 0; b < cm.ndofs; ++b) {
        const int la = ld[static_cast<std::size_t>(a)], lb = ld[static_cast<std::size_t>(b)];
        if (la > lb) continue;
        kt.push_back({la, lb, cm.k(a, b)});
        if (cm.m(a, b) != 0.0) mt.push_back({la, lb, cm.m(a, b)});
      }
    if (stokes) {
      const double area = system.cell_areas[static_cast<std::size_t>(cell)];
      for (std::size_t i = 0; i < 3; ++i) {
        const int q = pressure_index(cm.pressure_nodes[i]);
        loc.pressure_weights[static_cast<std::size_t>(q)] += area / 3.0;
        for (int a = 0; a < cm.ndofs; ++a) bt.push_back({q, ld[static_cast<std::size_t>(a)], cm.divergence[i * 12 + static_cast<std::size_t>(a)]});
      }
    }
  }
  const int n = static_cast<int>(loc.dofs.size());
  loc.stiffness = linalg::SparseSym::from_triplets(n, kt);
  loc.mass = linalg::SparseSym::from_triplets(n, mt);
  if (stokes) loc.divergence = linalg::CsrMatrix::from_triplets(static_cast<int>(loc.pressure_nodes.size()), n, bt);
  return loc;
}

namespace {

linalg::DenseMatrix extend_elliptic(const LocalSpace& loc, const linalg::DenseMatrix& g) {
  const std::size_t n = loc.size(), nb = loc.boundary.size(), ni = loc.interior.size();
  linalg::DenseMatrix out(n, g.cols(), 0.0);
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t b = 0; b < nb; ++b) out(static_cast<std::size_t>(loc.boundary[b]), j) = g(b, j);
  if (ni == 0) return out;

  const linalg::SparseSym a_ii = loc.stiffness.submatrix(loc.interior);
  const linalg::CsrMatrix a_ib = loc.stiffness.block(loc.interior, loc.boundary);
  linalg::DenseMatrix rhs(ni, g.cols());
  for (std::size_t j = 0; j < g.cols(); ++j) {
    const linalg::Vector r = a_ib * g.col(j);
    for (std::size_t i = 0; i < ni; ++i) rhs(i, j) = -r[i];
  }
  linalg::DenseMatrix x;
  try {
    x = linalg::SpdSolver(a_ii).solve(rhs);
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularLocalSystem,
                "harmonic extension around coarse node " + std::to_string(loc.patch.coarse_node) + ": " + e.detail());
  }
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < ni; ++i) out(static_cast<std::size_t>(loc.interior[i]), j) = x(i, j);
  return out;
}

// Velocity-pressure extension with a mean-zero pressure gauge.
linalg::DenseMatrix extend_stokes(const LocalSpace& loc, linalg::DenseMatrix g) {
  const std::size_t n = loc.size(), nb = loc.boundary.size(), ni = loc.interior.size();
  const std::size_t np = loc.pressure_nodes.size();
  const auto& B = loc.divergence;

  std::vector<int> role(n, -1);  // interior position, or -2 - boundary position
  for (std::size_t i = 0; i < ni; ++i) role[static_cast<std::size_t>(loc.interior[i])] = static_cast<int>(i);
  for (std::size_t b = 0; b < nb; ++b) role[static_cast<std::size_t>(loc.boundary[b])] = -2 - static_cast<int>(b);

  // Flux of each boundary DOF through the patch boundary; data is projected to zero net flux.
  linalg::Vector flux(nb, 0.0);
  for (int q = 0; q < B.rows(); ++q)
    for (int p = B.row_ptr()[static_cast<std::size_t>(q)]; p < B.row_ptr()[static_cast<std::size_t>(q) + 1]; ++p) {
      const int r = role[static_cast<std::size_t>(B.col_idx()[static_cast<std::size_t>(p)])];
      if (r <= -2) flux[static_cast<std::size_t>(-2 - r)] += B.values()[static_cast<std::size_t>(p)];
    }
  double cc = 0.0;
  for (const double c : flux) cc += c * c;
  if (cc > 0.0)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      double cg = 0.0;
      for (std::size_t b = 0; b < nb; ++b) cg += flux[b] * g(b, j);
      for (std::size_t b = 0; b < nb; ++b) g(b, j) -= cg / cc * flux[b];
    }

  const int size = static_cast<int>(ni + np + 1);
  std::vector<linalg::Triplet> t;
  const auto& A = loc.stiffness;
  for (int r = 0; r < A.size(); ++r) {
    const int ir = role[static_cast<std::size_t>(r)];
    if (ir < 0) continue;
    for (int p = A.row_ptr()[static_cast<std::size_t>(r)]; p < A.row_ptr()[static_cast<std::size_t>(r) + 1]; ++p) {
      const int ic = role[static_cast<std::size_t>(A.col_idx()[static_cast<std::size_t>(p)])];
      if (ic >= 0) t.push_back({ir, ic, A.values()[static_cast<std::size_t>(p)]});
    }
  }
  for (int q = 0; q < B.rows(); ++q) {
    const int row = static_cast<int>(ni) + q;
    for (int p = B.row_ptr()[static_cast<std::size_t>(q)]; p < B.row_ptr()[static_cast<std::size_t>(q) + 1]; ++p) {
      const int ic = role[static_cast<std::size_t>(B.col_idx()[static_cast<std::size_t>(p)])];
      if (ic >= 0) t.push_back({ic, row, -B.values()[static_cast<std::size_t>(p)]});
    }
    t.push_back({row, size - 1, loc.pressure_weights[static_cast<std::size_t>(q)]});
  }
  std::unique_ptr<linalg::IndefiniteSolver> solver;
  try {
    solver = std::make_unique<linalg::IndefiniteSolver>(linalg::SparseSym::from_triplets(size, t));
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularLocalSystem,
                "Stokes extension around coarse node " + std::to_string(loc.patch.coarse_node) + ": " + e.detail());
  }

  linalg::DenseMatrix out(n, g.cols(), 0.0);
  linalg::Vector full(n), rhs(static_cast<std::size_t>(size));
  for (std::size_t j = 0; j < g.cols(); ++j) {
    std::fill(full.begin(), full.end(), 0.0);
    for (std::size_t b = 0; b < nb; ++b) full[static_cast<std::size_t>(loc.boundary[b])] = g(b, j);
    const linalg::Vector ag = A * full;
    const linalg::Vector bg = B * full;
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (std::size_t i = 0; i < ni; ++i) rhs[i] = -ag[static_cast<std::size_t>(loc.interior[i])];
    for (std::size_t q = 0; q < np; ++q) rhs[ni + q] = bg[q];
    const linalg::Vector x = solver->solve(rhs);
    for (std::size_t b = 0; b < nb; ++b) out(static_cast<std::size_t>(loc.boundary[b]), j) = g(b, j);
    for (std::size_t i = 0; i < ni; ++i) out(static_cast<std::size_t>(loc.interior[i]), j) = x[i];
  }
  return out;
}

} // namespace

linalg::DenseMatrix harmonic_extension(const LocalSpace& local, const fem::Operator& op, const linalg::DenseMatrix& boundary_values) {
  if (boundary_values.rows() != local.boundary.size())
    throw Error(ErrorCode::DimensionMismatch, "boundary data has " + std::to_string(boundary_values.rows()) + " rows, patch has " +
                                                  std::to_string(local.boundary.size()) + " boundary DOFs");
  if (op.kind == fem::OperatorKind::Stokes) return extend_stokes(local, boundary_values);
  return extend_elliptic(local, boundary_values);
}

} // namespace pmsfem::gmsfem
