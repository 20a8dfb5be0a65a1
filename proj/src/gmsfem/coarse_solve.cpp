#include "pmsfem/gmsfem/coarse_space.hpp"

#include "pmsfem/error.hpp"
#include "pmsfem/linalg/solvers.hpp"

#include <memory>
#include <string>

namespace pmsfem::gmsfem {

namespace {

std::unique_ptr<linalg::SpdSolver> factor_coarse(const linalg::SparseSym& a) {
  try {
    return std::make_unique<linalg::SpdSolver>(a);
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularCoarseMatrix, "coarse matrix of size " + std::to_string(a.size()) + ": " + e.detail());
  }
}

// Two steps of iterative refinement against the assembled coarse matrix.
linalg::Vector refined_solve(const linalg::SpdSolver& solver, const linalg::SparseSym& a, std::span<const double> b) {
  linalg::Vector x = solver.solve(b);
  for (int step = 0; step < 2; ++step) {
    linalg::Vector r = a * x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const linalg::Vector dx = solver.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }
  return x;
}

linalg::Vector downscale(const CoarseSpace& space, const fem::FineSystem& system, std::span<const double> coefficients) {
  linalg::Vector u = space.R.multiply_transposed(coefficients);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += system.dirichlet[i];
  return u;
}

} // namespace

CoarseSolution coarse_solve(const CoarseSpace& space, const fem::FineSystem& system) {
  if (space.R.cols() != static_cast<int>(system.num_dofs()))
    throw Error(ErrorCode::DimensionMismatch, "coarse space does not match the fine system");
  const linalg::SparseSym a = linalg::congruence(space.R, system.stiffness);
  const linalg::Vector b = space.R * system.lifted_load();
  const auto solver = factor_coarse(a);

  CoarseSolution out;
  out.coefficients = refined_solve(*solver, a, b);
  out.fine.kind = system.op.kind;
  out.fine.u = downscale(space, system, out.coefficients);
  return out;
}

CoarseSolution coarse_solve_stokes(const CoarseSpace& space, const fem::FineSystem& system, const mesher::FineMesh& mesh,
                                   const mesher::CoarseGrid& coarse, CoarsePressure pressure) {
  if (system.op.kind != fem::OperatorKind::Stokes) throw Error(ErrorCode::InvalidConfig, "coarse Stokes solve on a non-Stokes system");
  if (space.R.cols() != static_cast<int>(system.num_dofs()))
    throw Error(ErrorCode::DimensionMismatch, "coarse space does not match the fine system");

  // Divergence against the coarse pressure space and its mean-value weights.
  linalg::CsrMatrix div;
  linalg::Vector weights;
  if (pressure == CoarsePressure::CoarseCells) {
    const auto& cd = system.cell_divergence;
    std::vector<linalg::Triplet> t;
    weights.assign(coarse.triangles.size(), 0.0);
    for (int cell = 0; cell < cd.rows(); ++cell) {
      const int parent = mesh.coarse_parent[static_cast<std::size_t>(cell)];
      weights[static_cast<std::size_t>(parent)] += system.cell_areas[static_cast<std::size_t>(cell)];
      for (int p = cd.row_ptr()[static_cast<std::size_t>(cell)]; p < cd.row_ptr()[static_cast<std::size_t>(cell) + 1]; ++p)
        t.push_back({parent, cd.col_idx()[static_cast<std::size_t>(p)], cd.values()[static_cast<std::size_t>(p)]});
    }
    div = linalg::CsrMatrix::from_triplets(static_cast<int>(coarse.triangles.size()), cd.cols(), t);
  } else if (pressure == CoarsePressure::CoarseNodes) {
    // Coarse hats are piecewise linear on the fine mesh, so they are combinations of fine P1 pressures.
    const auto& b = system.divergence;
    std::vector<linalg::Triplet> t;
    weights.assign(coarse.nodes.size(), 0.0);
    for (int v = 0; v < b.rows(); ++v) {
      const mesher::Vec2 p = mesh.nodes[static_cast<std::size_t>(v)];
      for (const int j : coarse.triangles[static_cast<std::size_t>(coarse.locate(p))]) {
        const double hat = mesher::coarse_hat(coarse, j, p);
        if (hat == 0.0) continue;
        weights[static_cast<std::size_t>(j)] += hat * system.pressure_weights[static_cast<std::size_t>(v)];
        for (int q = b.row_ptr()[static_cast<std::size_t>(v)]; q < b.row_ptr()[static_cast<std::size_t>(v) + 1]; ++q)
          t.push_back({j, b.col_idx()[static_cast<std::size_t>(q)], hat * b.values()[static_cast<std::size_t>(q)]});
      }
    }
    div = linalg::CsrMatrix::from_triplets(static_cast<int>(coarse.nodes.size()), b.cols(), t);
  } else {
    div = system.divergence;
    weights = system.pressure_weights;
  }
  const std::size_t np = weights.size();
  const std::size_t nc = space.dimension();

  const linalg::SparseSym a = linalg::congruence(space.R, system.stiffness);
  const auto solver = factor_coarse(a);
  const linalg::DenseMatrix g = linalg::multiply(div, space.R.transpose()).to_dense();  // np x nc
  const linalg::Vector f = space.R * system.lifted_load();
  const linalg::Vector h = div * system.dirichlet;

  // Momentum: A x - Gᵀ p = f. Continuity: -G x = h. Eliminate x = A⁻¹(f + Gᵀ p).
  const linalg::DenseMatrix y = solver->solve(g.transpose());  // nc x np
  linalg::DenseMatrix schur = linalg::multiply(g, y);
  linalg::symmetrize(schur);
  const linalg::Vector z = refined_solve(*solver, a, f);
  const linalg::Vector gz = linalg::multiply(g, z);

  const linalg::PivotedCholesky pc = linalg::pivoted_cholesky(schur, 1e-10);
  if (pc.dependent.size() > 1)
    throw Error(ErrorCode::CoarseInfSupFailure, std::to_string(pc.dependent.size()) + " pressure modes are not controlled by the " +
                                                    std::to_string(nc) + "-dimensional coarse velocity space");

  linalg::DenseMatrix bordered(np + 1, np + 1, 0.0);
  linalg::Vector rhs(np + 1, 0.0);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < np; ++i) bordered(i, j) = schur(i, j);
    bordered(j, np) = weights[j];
    bordered(np, j) = weights[j];
    rhs[j] = -h[j] - gz[j];
  }
  const linalg::Vector sol = linalg::lu_solve(bordered, rhs);

  CoarseSolution out;
  out.coarse_pressure.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(np));
  linalg::Vector rhs_x = f;
  const linalg::Vector gtp = linalg::multiply(g.transpose(), out.coarse_pressure);
  for (std::size_t i = 0; i < nc; ++i) rhs_x[i] += gtp[i];
  out.coefficients = refined_solve(*solver, a, rhs_x);
  out.fine.kind = fem::OperatorKind::Stokes;
  out.fine.u = downscale(space, system, out.coefficients);
  if (pressure == CoarsePressure::CoarseCells) {
    out.fine.pressure_per_cell = true;
    out.fine.pressure.resize(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      out.fine.pressure[t] = out.coarse_pressure[static_cast<std::size_t>(mesh.coarse_parent[t])];
  } else if (pressure == CoarsePressure::CoarseNodes) {
    out.fine.pressure.assign(mesh.num_nodes(), 0.0);
    for (std::size_t v = 0; v < mesh.num_nodes(); ++v)
      for (const int j : coarse.triangles[static_cast<std::size_t>(coarse.locate(mesh.nodes[v]))])
        out.fine.pressure[v] += mesher::coarse_hat(coarse, j, mesh.nodes[v]) * out.coarse_pressure[static_cast<std::size_t>(j)];
  } else {
    out.fine.pressure = out.coarse_pressure;
  }
  return out;
}

} // namespace pmsfem::gmsfem
