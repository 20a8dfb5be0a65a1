#include "pmsfem/error.hpp"
#include "pmsfem/fem/elements.hpp"
#include "pmsfem/gmsfem/coarse_space.hpp"
#include "pmsfem/harness/norms.hpp"
#include "pmsfem/linalg/eigen.hpp"
#include "support/generators.hpp"
#include "support/sessions.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace pmsfem;
using namespace pmsfem::gmsfem;
using fem::OperatorKind;
using linalg::DenseMatrix;
using linalg::Vector;

namespace {

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

/// Eigen residual ‖A c - λ S c‖ relative to (‖A‖ + |λ| ‖S‖) ‖c‖, worst over the selection.
double worst_eigen_residual(const LocalForms& f, const OfflineSelection& sel) {
  const double na = linalg::frobenius_norm(f.stiffness), ns = linalg::frobenius_norm(f.mass);
  double worst = 0.0;
  for (std::size_t j = 0; j < sel.coordinates.cols(); ++j) {
    const auto c = sel.coordinates.col(j);
    const Vector ac = linalg::multiply(f.stiffness, c), sc = linalg::multiply(f.mass, c);
    double r = 0.0;
    for (std::size_t i = 0; i < ac.size(); ++i) r += std::pow(ac[i] - sel.eigenvalues[j] * sc[i], 2);
    worst = std::max(worst, std::sqrt(r) / ((na + std::abs(sel.eigenvalues[j]) * ns) * linalg::norm2(c)));
  }
  return worst;
}

void check_partition_of_unity(harness::Session& s) {
  const auto& pou = s.partition_of_unity();
  const auto& sys = s.system();
  const auto& coarse = s.coarse();
  const auto& nbs = s.neighborhoods();
  for (std::size_t v = 0; v < sys.space.num_nodes(); ++v) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pou.num_coarse_nodes; ++i) {
      const double x = pou.at(static_cast<int>(i), static_cast<int>(v));
      CHECK(x >= 0.0);
      CHECK(x <= 1.0 + 1e-15);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  for (std::size_t i = 0; i < pou.num_coarse_nodes; ++i) {
    // supp(χ_i) ⊂ ω_i: every fine node where χ_i is nonzero belongs to the patch.
    std::set<int> patch_nodes;
    for (int e : nbs[i].patch.elements)
      for (int n : sys.space.cell_nodes[static_cast<std::size_t>(e)]) patch_nodes.insert(n);
    for (std::size_t v = 0; v < sys.space.num_nodes(); ++v)
      if (pou.at(static_cast<int>(i), static_cast<int>(v)) > 1e-14) CHECK(patch_nodes.count(static_cast<int>(v)) == 1);
    // χ_i at coarse node j is δ_ij (coarse nodes on holes are not fine nodes; skip those).
    for (std::size_t j = 0; j < coarse.nodes.size(); ++j)
      for (std::size_t v = 0; v < sys.space.num_vertices; ++v)
        if (mesher::distance(sys.space.node_coords[v], coarse.nodes[j]) < 1e-14)
          CHECK(pou.at(static_cast<int>(i), static_cast<int>(v)) == (i == j ? 1.0 : 0.0));
  }
}

} // namespace

TEST_CASE("partition of unity on both presets") {
  for (const char* preset : {"large", "small"}) {
    CAPTURE(preset);
    harness::Session s(fixture::config(OperatorKind::Laplace, SnapshotKind::Spectral, {1}, preset));
    check_partition_of_unity(s);
  }
  harness::Session p2(fixture::config(OperatorKind::Stokes, SnapshotKind::Harmonic, {1}, "large", 0.1));
  check_partition_of_unity(p2);
}

TEST_CASE("harmonic snapshots") {
  for (OperatorKind op : {OperatorKind::Laplace, OperatorKind::Elasticity, OperatorKind::Stokes}) {
    CAPTURE(fem::to_string(op));
    harness::Session s(fixture::config(op, SnapshotKind::Harmonic, {1}, "large", 0.1));
    const auto& sys = s.system();
    for (int node : {0, 14, 21}) {
      const auto& local = s.neighborhoods()[static_cast<std::size_t>(node)];
      const auto snaps = harmonic_snapshots(local, sys.op);
      CHECK(snaps.columns.cols() == local.boundary.size());
      CHECK(snapshot_count(local, snaps) == local.boundary.size());
      CHECK(local.boundary.size() == local.patch.boundary_nodes.size() * static_cast<std::size_t>(sys.op.components()) +
                                         (op == OperatorKind::Stokes ? 2 * local.patch.boundary_edges.size() : 0));
      for (int p : local.perforation)
        for (std::size_t j = 0; j < snaps.columns.cols(); ++j) CHECK(snaps.columns(static_cast<std::size_t>(p), j) == 0.0);
      if (op == OperatorKind::Stokes) continue;
      // Unit data on its own boundary DOF, zero on the others.
      for (std::size_t l = 0; l < local.boundary.size(); ++l)
        for (std::size_t k = 0; k < local.boundary.size(); ++k)
          CHECK(snaps.columns(static_cast<std::size_t>(local.boundary[k]), l) == (k == l ? 1.0 : 0.0));
      // Local equation at interior DOFs.
      double kmax = 0.0;
      for (double v : local.stiffness.values()) kmax = std::max(kmax, std::abs(v));
      for (std::size_t l = 0; l < snaps.columns.cols(); ++l) {
        const Vector r = local.stiffness * snaps.columns.col(l);
        double worst = 0.0;
        for (int i : local.interior) worst = std::max(worst, std::abs(r[static_cast<std::size_t>(i)]));
        CHECK(worst <= 1e-9 * kmax * linalg::norm2(snaps.columns.col(l)));
      }
    }
  }
}

TEST_CASE("harmonic extension of constant data without holes is constant") {
  harness::Session s(fixture::config(OperatorKind::Laplace, SnapshotKind::Harmonic, {1}, "none", 0.08));
  const auto& local = s.neighborhoods()[14];
  REQUIRE(local.perforation.empty());
  const auto snaps = harmonic_snapshots(local, s.system().op);
  for (std::size_t i = 0; i < local.size(); ++i) {
    double sum = 0.0;
    for (std::size_t l = 0; l < snaps.columns.cols(); ++l) sum += snaps.columns(i, l);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("spectral snapshots and local forms") {
  harness::Session s(fixture::config(OperatorKind::Elasticity, SnapshotKind::Spectral, {1}, "large", 0.1));
  const auto& local = s.neighborhoods()[14];
  const auto snaps = spectral_snapshots(local);
  CHECK(snaps.columns.empty());
  CHECK(snapshot_count(local, snaps) == local.free.size());
  const auto forms = local_forms(local, snaps);
  CHECK(forms.stiffness == local.stiffness.submatrix(local.free).to_dense());
  CHECK(forms.mass == local.mass.submatrix(local.free).to_dense());

  // Identity columns give the same forms through the congruence path.
  SnapshotSet identity{SnapshotKind::Harmonic, DenseMatrix(local.size(), local.free.size()), 0};
  for (std::size_t j = 0; j < local.free.size(); ++j) identity.columns(static_cast<std::size_t>(local.free[j]), j) = 1.0;
  const auto via = local_forms(local, identity);
  CHECK(max_abs_diff(via.stiffness, forms.stiffness) == 0.0);

  SnapshotSet wrong{SnapshotKind::Harmonic, DenseMatrix(3, 2), 0};
  CHECK_THROWS_AS(local_forms(local, wrong), Error);
}

TEST_CASE("elasticity snapshot mass scales with lambda + 2 mu") {
  auto c1 = fixture::config(OperatorKind::Elasticity, SnapshotKind::Spectral, {1}, "large", 0.1);
  auto c2 = c1;
  c2.op.young = 3.5e9;
  c2.op.poisson = 0.3;
  harness::Session s1(c1), s2(c2);
  const auto& l1 = s1.neighborhoods()[7];
  const auto& l2 = s2.neighborhoods()[7];
  const double ratio = c2.op.snapshot_mass_weight() / c1.op.snapshot_mass_weight();
  const auto m1 = l1.mass.to_dense(), m2 = l2.mass.to_dense();
  for (std::size_t j = 0; j < m1.cols(); ++j)
    for (std::size_t i = 0; i < m1.rows(); ++i) CHECK(m2(i, j) == doctest::Approx(ratio * m1(i, j)).epsilon(1e-13));
}

TEST_CASE("select_offline on small pencils") {
  DenseMatrix a(3, 3), id = DenseMatrix::identity(3);
  a(0, 0) = 1;
  a(1, 1) = 4;
  a(2, 2) = 9;
  const auto sel = select_offline({a, id}, 2);
  REQUIRE(sel.eigenvalues.size() == 2);
  CHECK(sel.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(sel.eigenvalues[1] == doctest::Approx(4.0));
  CHECK(std::abs(sel.coordinates(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(sel.coordinates(1, 1)) == doctest::Approx(1.0));
  CHECK_FALSE(sel.insufficient_rank);

  gen::Rng rng(51);
  const auto s = gen::spd(rng, 5);
  const auto same = select_offline({s, s}, 3);
  for (double v : same.eigenvalues) CHECK(v == doctest::Approx(1.0));
  CHECK(max_abs_diff(linalg::multiply_transposed(same.coordinates, linalg::multiply(s, same.coordinates)), DenseMatrix::identity(3)) <= 1e-10);

  const auto over = select_offline({a, id}, 5);
  CHECK(over.insufficient_rank);
  CHECK(over.eigenvalues.size() == 3);
}

TEST_CASE("offline bases: eigen residuals, S-orthonormality, ordering, sign") {
  for (const char* preset : {"large", "small"}) {
    for (OperatorKind op : {OperatorKind::Laplace, OperatorKind::Elasticity}) {
      for (SnapshotKind kind : {SnapshotKind::Harmonic, SnapshotKind::Spectral}) {
        CAPTURE(preset);
        CAPTURE(fem::to_string(op));
        CAPTURE(to_string(kind));
        harness::Session s(fixture::config(op, kind, {4}, preset, 0.1));
        for (int node : {0, 9, 14, 35}) {
          const auto& local = s.neighborhoods()[static_cast<std::size_t>(node)];
          const auto snaps = kind == SnapshotKind::Spectral ? spectral_snapshots(local) : harmonic_snapshots(local, s.system().op);
          const auto forms = local_forms(local, snaps);
          const auto sel = select_offline(forms, 8);
          CHECK(worst_eigen_residual(forms, sel) <= 1e-10);

          const auto basis = offline_basis(local, snaps, 8);
          CHECK(std::is_sorted(basis.eigenvalues.begin(), basis.eigenvalues.end()));
          for (double l : basis.eigenvalues) CHECK(l >= -1e-10);
          const auto gram = linalg::congruence(basis.vectors, local.mass);
          CHECK(max_abs_diff(gram, DenseMatrix::identity(basis.size())) <= 1e-8);
          for (std::size_t j = 0; j < basis.size(); ++j) {
            const auto c = basis.vectors.col(j);
            const auto it = std::max_element(c.begin(), c.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
            CHECK(*it > 0.0);
          }
          const auto t = basis.truncated(3);
          CHECK(t.size() == 3);
          CHECK(t.vectors == basis.vectors.leading_columns(3));
        }
      }
    }
  }
}

TEST_CASE("coarse space rows stay inside their neighborhoods") {
  harness::Session s(fixture::config(OperatorKind::Elasticity, SnapshotKind::Harmonic, {4}, "large", 0.08));
  const auto cs = s.coarse_space(4, RankPolicy::Throw);
  const auto& sys = s.system();
  CHECK(cs.dropped.empty());
  CHECK(cs.dimension() == 36 * 4 * 2);
  for (std::size_t r = 0; r < cs.dimension(); ++r) {
    const auto& local = s.neighborhoods()[static_cast<std::size_t>(cs.row_node[r])];
    if (r > 0) CHECK(std::make_pair(cs.row_node[r - 1], cs.row_mode[r - 1]) < std::make_pair(cs.row_node[r], cs.row_mode[r]));
    for (int k = cs.R.row_ptr()[r]; k < cs.R.row_ptr()[r + 1]; ++k) {
      const int col = cs.R.col_idx()[static_cast<std::size_t>(k)];
      if (cs.R.values()[static_cast<std::size_t>(k)] == 0.0) continue;
      CHECK(std::binary_search(local.dofs.begin(), local.dofs.end(), col));
      CHECK_FALSE(sys.constrained[static_cast<std::size_t>(col)]);
    }
  }
}

TEST_CASE("rank policy: all local functions are dependent across neighborhoods") {
  auto c = fixture::config(OperatorKind::Laplace, SnapshotKind::Spectral, {1000}, "none", 0.15);
  c.coarse_h = 0.5;
  harness::Session s(c);
  try {
    s.coarse_space(1000, RankPolicy::Throw);
    FAIL("expected RankDeficientCoarseSpace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficientCoarseSpace);
  }
  const auto kept = s.coarse_space(1000, RankPolicy::Drop);
  CHECK_FALSE(kept.dropped.empty());
  CHECK(kept.dimension() == s.system().free_dofs.size());
}

TEST_CASE("constant local functions reproduce the coarse P1 stiffness") {
  harness::Session s(fixture::config(OperatorKind::Laplace, SnapshotKind::Spectral, {1}, "none", 0.07));
  const auto& coarse = s.coarse();
  std::vector<LocalBasis> bases;
  for (const auto& local : s.neighborhoods()) {
    LocalBasis b;
    b.dofs = local.dofs;
    b.eigenvalues = {0.0};
    b.vectors = DenseMatrix(local.size(), 1, 1.0);
    bases.push_back(b);
  }
  const auto cs = assemble_coarse_space(s.system(), s.partition_of_unity(), bases);
  const auto ac = linalg::congruence(cs.R, s.system().stiffness).to_dense();

  DenseMatrix p1(coarse.nodes.size(), coarse.nodes.size());
  for (const auto& t : coarse.triangles) {
    const auto k = fem::element_laplace({coarse.nodes[static_cast<std::size_t>(t[0])], coarse.nodes[static_cast<std::size_t>(t[1])],
                                         coarse.nodes[static_cast<std::size_t>(t[2])]});
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) p1(static_cast<std::size_t>(t[a]), static_cast<std::size_t>(t[b])) += k(a, b);
  }
  const auto interior = [&](int n) {
    const auto p = coarse.nodes[static_cast<std::size_t>(n)];
    return p.x > 1e-9 && p.x < 1 - 1e-9 && p.y > 1e-9 && p.y < 1 - 1e-9;
  };
  int compared = 0;
  for (std::size_t r = 0; r < cs.dimension(); ++r)
    for (std::size_t q = 0; q < cs.dimension(); ++q) {
      const int i = cs.row_node[r], j = cs.row_node[q];
      if (!interior(i) || !interior(j)) continue;
      CHECK(ac(r, q) == doctest::Approx(p1(static_cast<std::size_t>(i), static_cast<std::size_t>(j))).epsilon(1e-12).scale(1.0));
      ++compared;
    }
  CHECK(compared == 16 * 16);
}

TEST_CASE("coarse solve: Galerkin optimality, Dirichlet exactness and nesting") {
  for (const char* preset : {"large", "small"}) {
    for (OperatorKind op : {OperatorKind::Laplace, OperatorKind::Elasticity}) {
      CAPTURE(preset);
      CAPTURE(fem::to_string(op));
      harness::Session s(fixture::config(op, SnapshotKind::Spectral, {1, 2, 4, 8}, preset, 0.08));
      const auto& sys = s.system();
      const auto& fine = s.fine_solution();
      double previous = std::numeric_limits<double>::infinity();
      for (int nc : {1, 2, 4, 8}) {
        const auto cs = s.coarse_space(nc);
        const auto sol = coarse_solve(cs, sys);
        for (std::size_t d = 0; d < sys.num_dofs(); ++d)
          if (sys.constrained[d]) CHECK(sol.fine.u[d] == sys.dirichlet[d]);
        const double err = fixture::energy_distance(sys, fine.u, sol.fine.u);
        CHECK(err <= previous * (1.0 + 1e-10));
        previous = err;

        gen::Rng rng(static_cast<std::uint64_t>(nc));
        double coef_scale = 0.0;
        for (double v : sol.coefficients) coef_scale = std::max(coef_scale, std::abs(v));
        for (int trial = 0; trial < 20; ++trial) {
          Vector c = sol.coefficients;
          const double amp = coef_scale * std::pow(10.0, gen::uniform(rng, -6.0, 0.0));
          for (double& v : c) v += amp * gen::uniform(rng);
          Vector competitor = cs.R.multiply_transposed(c);
          for (std::size_t d = 0; d < competitor.size(); ++d) competitor[d] += sys.dirichlet[d];
          CHECK(err <= fixture::energy_distance(sys, fine.u, competitor) * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("coarse Stokes solves") {
  harness::Session s(fixture::config(OperatorKind::Stokes, SnapshotKind::Harmonic, {2}, "large", 0.1));
  const auto cs = s.coarse_space(2);
  for (CoarsePressure p : {CoarsePressure::CoarseNodes, CoarsePressure::CoarseCells}) {
    const auto sol = coarse_solve_stokes(cs, s.system(), s.mesh(), s.coarse(), p);
    CHECK(sol.fine.pressure_per_cell == (p == CoarsePressure::CoarseCells));
    CHECK(std::abs(fem::pressure_mean(s.system(), sol.fine)) <= 1e-10);
    CHECK(sol.coarse_pressure.size() == (p == CoarsePressure::CoarseNodes ? 36u : 50u));
    for (std::size_t d = 0; d < s.system().num_dofs(); ++d)
      if (s.system().constrained[d]) CHECK(sol.fine.u[d] == s.system().dirichlet[d]);
    const auto e = harness::relative_errors(s.system(), sol.fine, s.fine_solution());
    CHECK(e.l2 < 1.0);
  }
}

TEST_CASE("full local spaces reproduce the fine solution for every operator") {
  for (OperatorKind op : {OperatorKind::Laplace, OperatorKind::Elasticity, OperatorKind::Stokes}) {
    CAPTURE(fem::to_string(op));
    auto c = fixture::config(op, SnapshotKind::Spectral, {100000}, "large", 0.15);
    c.coarse_h = 0.5;
    c.preset = "large";
    c.inclusions = {{{0.2, 0.35}, 0.07}, {{0.7, 0.35}, 0.08}};
    harness::Session s(c);
    const auto cs = s.coarse_space(100000);
    const auto sol = op == OperatorKind::Stokes ? coarse_solve_stokes(cs, s.system(), s.mesh(), s.coarse(), CoarsePressure::FineNodes)
                                                : coarse_solve(cs, s.system());
    const auto e = harness::relative_errors(s.system(), sol.fine, s.fine_solution());
    CHECK(e.h1 <= 1e-8);
    CHECK(e.l2 <= 1e-8);
  }
}
