#include "pmsfem/error.hpp"
#include "pmsfem/linalg/eigen.hpp"
#include "pmsfem/linalg/solvers.hpp"
#include "support/generators.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pmsfem;
using namespace pmsfem::linalg;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return m;
}

DenseMatrix diag(std::initializer_list<double> d) {
  DenseMatrix m(d.size(), d.size());
  std::size_t i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

DenseMatrix scale_cols(const DenseMatrix& v, const Vector& s) {
  DenseMatrix out = v;
  for (std::size_t j = 0; j < v.cols(); ++j)
    for (std::size_t i = 0; i < v.rows(); ++i) out(i, j) *= s[j];
  return out;
}

void check_standard(const DenseMatrix& a, const SymmetricEigen& e) {
  const std::size_t n = a.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(to_eigen(a));
  const double scale = frobenius_norm(a);
  REQUIRE(e.values.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e.values[i] - oracle.eigenvalues()(static_cast<Eigen::Index>(i))) <= 1e-10 * scale);
  CHECK(std::is_sorted(e.values.begin(), e.values.end()));
  CHECK(max_abs_diff(multiply_transposed(e.vectors, e.vectors), DenseMatrix::identity(n)) <= 1e-10);
  CHECK(max_abs_diff(multiply(a, e.vectors), scale_cols(e.vectors, e.values)) <= 1e-10 * scale);
}

} // namespace

TEST_CASE("dense products and transpose") {
  gen::Rng rng(1);
  const auto a = gen::dense(rng, 4, 3), b = gen::dense(rng, 3, 5);
  const auto c = multiply(a, b);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  CHECK(max_abs_diff(multiply_transposed(a, a), multiply(a.transpose(), a)) <= 1e-14);
  CHECK(a.transpose().transpose() == a);
  const auto lead = c.leading_columns(2);
  CHECK(lead.cols() == 2);
  CHECK(lead(3, 1) == c(3, 1));
}

TEST_CASE("lu_solve inverts random systems and rejects singular ones") {
  gen::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 30));
    const auto a = gen::dense(rng, n, n);
    const auto b = gen::vector(rng, n);
    const auto x = lu_solve(a, b);
    const auto r = multiply(a, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-8));
  }
  DenseMatrix s(3, 3, 1.0);
  CHECK_THROWS_AS(lu_solve(s, Vector{1, 2, 3}), Error);
}

TEST_CASE("pivoted_cholesky finds dependent columns") {
  gen::Rng rng(3);
  auto m = gen::dense(rng, 8, 5);
  for (std::size_t i = 0; i < 8; ++i) m(i, 3) = 2.0 * m(i, 0) - m(i, 1);  // column 3 dependent
  const auto g = multiply_transposed(m, m);
  const auto pc = pivoted_cholesky(g, 1e-10);
  CHECK(pc.rank() == 4);
  REQUIRE(pc.dependent.size() == 1);
  CHECK((pc.dependent[0] == 0 || pc.dependent[0] == 1 || pc.dependent[0] == 3));
}

TEST_CASE("Jacobi eigensolver matches the Eigen oracle") {
  gen::Rng rng(4);
  for (std::size_t n : {1u, 2u, 3u, 7u, 20u, 60u}) {
    CAPTURE(n);
    const auto a = gen::symmetric(rng, n);
    check_standard(a, eig_sym_jacobi(a));
  }
}

TEST_CASE("tridiagonal QL eigensolver matches the Eigen oracle") {
  gen::Rng rng(5);
  for (std::size_t n : {1u, 2u, 5u, 33u, 120u, 250u}) {
    CAPTURE(n);
    const auto a = gen::symmetric(rng, n);
    check_standard(a, eig_sym_tridiagonal(a));
  }
  // Repeated eigenvalues.
  const auto d = diag({2, 2, 2, 5, 5, -1});
  check_standard(d, eig_sym_tridiagonal(d));
  check_standard(d, eig_sym_jacobi(d));
}

TEST_CASE("eig_sym rejects non-symmetric input") {
  DenseMatrix a = DenseMatrix::identity(3);
  a(0, 2) = 1.0;
  CHECK_THROWS_AS(eig_sym(a), Error);
}

TEST_CASE("generalized eigenproblem examples") {
  SUBCASE("A = S = I") {
    const auto e = eig_sym_generalized(DenseMatrix::identity(4), DenseMatrix::identity(4));
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));
    CHECK(e.mass_rank == 4);
  }
  SUBCASE("diagonal pencil") {
    const auto e = eig_sym_generalized(diag({1, 4}), diag({1, 2}));
    REQUIRE(e.values.size() == 2);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
  }
  SUBCASE("rank-one mass keeps one pair") {
    DenseMatrix s(2, 2, 1.0);
    const auto e = eig_sym_generalized(DenseMatrix::identity(2), s);
    CHECK(e.mass_rank == 1);
    CHECK(e.values.size() == 1);
    // v = (1,1)/2 in S-norm; λ = vᵀv / vᵀSv = 1/2
    CHECK(e.values[0] == doctest::Approx(0.5));
  }
  SUBCASE("zero mass") { CHECK_THROWS_AS(eig_sym_generalized(DenseMatrix::identity(2), DenseMatrix(2, 2)), Error); }
}

TEST_CASE("generalized eigenproblem properties") {
  gen::Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10;
    const auto a = gen::symmetric(rng, n);
    const auto s = gen::spd(rng, n);
    const auto e = eig_sym_generalized(a, s);
    REQUIRE(e.mass_rank == n);
    CHECK(max_abs_diff(multiply_transposed(e.vectors, multiply(s, e.vectors)), DenseMatrix::identity(n)) <= 1e-8);
    CHECK(max_abs_diff(multiply(a, e.vectors), multiply(s, scale_cols(e.vectors, e.values))) <= 1e-9);

    // S = I reduces to the standard problem.
    const auto std_e = eig_sym(a);
    const auto id_e = eig_sym_generalized(a, DenseMatrix::identity(n));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(std_e.values[i] - id_e.values[i]) <= 1e-10);

    // Congruence invariance: (PᵀAP, PᵀSP) has the same spectrum.
    auto p = gen::dense(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) p(i, i) += 3.0;
    auto pa = multiply(p.transpose(), multiply(a, p));
    auto ps = multiply(p.transpose(), multiply(s, p));
    symmetrize(pa);
    symmetrize(ps);
    const auto ce = eig_sym_generalized(pa, ps);
    REQUIRE(ce.values.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ce.values[i] - e.values[i]) <= 1e-8 * (1.0 + std::abs(e.values[i])));
  }
}

TEST_CASE("generalized eigenproblem on a near-singular mass uses the truncated range") {
  gen::Rng rng(7);
  const std::size_t n = 12, r = 7;
  const auto b = gen::dense(rng, r, n);
  auto s = multiply_transposed(b, b);  // rank 7
  symmetrize(s);
  const auto a = gen::spd(rng, n);
  const auto e = eig_sym_generalized(a, s);
  CHECK(e.mass_rank == r);
  REQUIRE(e.values.size() == r);
  const auto v = e.vectors;
  CHECK(max_abs_diff(multiply_transposed(v, multiply(s, v)), DenseMatrix::identity(r)) <= 1e-8);
  // Eigenpairs of the projected pencil: Vᵀ A V = diag(λ).
  const auto vav = multiply_transposed(v, multiply(a, v));
  for (std::size_t i = 0; i < r; ++i) CHECK(vav(i, i) == doctest::Approx(e.values[i]).epsilon(1e-8));
}

TEST_CASE("orthonormalize_cols") {
  gen::Rng rng(8);
  SUBCASE("identical columns") {
    auto m = gen::dense(rng, 6, 2);
    for (std::size_t i = 0; i < 6; ++i) m(i, 1) = m(i, 0);
    CHECK(orthonormalize_cols(m, 1e-10).rank == 1);
  }
  SUBCASE("identity") {
    const auto o = orthonormalize_cols(DenseMatrix::identity(5), 1e-10);
    CHECK(o.rank == 5);
    for (std::size_t j = 0; j < 5; ++j) {
      double big = 0.0;
      for (std::size_t i = 0; i < 5; ++i) big = std::max(big, std::abs(o.q(i, j)));
      CHECK(big == doctest::Approx(1.0));
    }
  }
  SUBCASE("random full rank") {
    const auto m = gen::dense(rng, 50, 10);
    const double tol = 1e-10;
    const auto o = orthonormalize_cols(m, tol);
    CHECK(o.rank == 10);
    CHECK(max_abs_diff(multiply_transposed(o.q, o.q), DenseMatrix::identity(10)) <= 1e-12);
    const auto rec = multiply(o.q, multiply_transposed(o.q, m));
    DenseMatrix diff = rec;
    for (std::size_t j = 0; j < 10; ++j)
      for (std::size_t i = 0; i < 50; ++i) diff(i, j) -= m(i, j);
    CHECK(frobenius_norm(diff) <= 1e-12 * frobenius_norm(m) + tol * frobenius_norm(m));
  }
}

TEST_CASE("sparse symmetric storage") {
  const std::vector<Triplet> t{{0, 0, 2.0}, {1, 0, -1.0}, {0, 1, -0.5}, {1, 1, 3.0}, {2, 2, 1.0}, {1, 1, 1.0}};
  const auto a = SparseSym::from_triplets(3, t);
  CHECK(a.entry(0, 1) == -1.5);
  CHECK(a.entry(1, 0) == -1.5);
  CHECK(a.entry(1, 1) == 4.0);
  CHECK(a.entry(0, 2) == 0.0);
  const auto d = a.to_dense();
  CHECK(asymmetry(d) == 0.0);
  for (std::size_t r = 0; r + 1 < a.row_ptr().size(); ++r)
    CHECK(std::is_sorted(a.col_idx().begin() + a.row_ptr()[r], a.col_idx().begin() + a.row_ptr()[r + 1]));
  CHECK_THROWS_AS(SparseSym::from_triplets(2, std::vector<Triplet>{{0, 5, 1.0}}), Error);
}

TEST_CASE("sparse operations agree with dense arithmetic") {
  gen::Rng rng(9);
  const auto a = gen::sparse_spd(rng, 40, 80);
  const auto d = a.to_dense();
  const auto x = gen::vector(rng, 40), y = gen::vector(rng, 40);
  const auto ax = a * x;
  const auto dx = multiply(d, x);
  for (std::size_t i = 0; i < 40; ++i) CHECK(ax[i] == doctest::Approx(dx[i]).epsilon(1e-13));
  double xy = 0.0;
  for (std::size_t i = 0; i < 40; ++i) xy += y[i] * dx[i];
  CHECK(a.bilinear(y, x) == doctest::Approx(xy).epsilon(1e-13));

  const std::vector<int> keep{3, 7, 8, 20, 39};
  const auto sub = a.submatrix(keep).to_dense();
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) CHECK(sub(i, j) == d(static_cast<std::size_t>(keep[i]), static_cast<std::size_t>(keep[j])));

  const std::vector<int> rows{1, 2}, cols{0, 1, 2, 3};
  const auto blk = a.block(rows, cols).to_dense();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(blk(i, j) == d(static_cast<std::size_t>(rows[i]), static_cast<std::size_t>(cols[j])));

  // R A Rᵀ
  std::vector<Triplet> rt;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 5; ++k) rt.push_back({i, gen::uniform_int(rng, 0, 39), gen::uniform(rng)});
  const auto r = CsrMatrix::from_triplets(6, 40, rt);
  const auto rd = r.to_dense();
  const auto expect = multiply(rd, multiply(d, rd.transpose()));
  CHECK(max_abs_diff(congruence(r, a).to_dense(), expect) <= 1e-12);
  CHECK(max_abs_diff(congruence(rd.transpose(), a), expect) <= 1e-12);

  const auto rtx = r.multiply_transposed(Vector(6, 1.0));
  const auto rdt = multiply(rd.transpose(), Vector(6, 1.0));
  for (std::size_t i = 0; i < 40; ++i) CHECK(rtx[i] == doctest::Approx(rdt[i]));
  CHECK(max_abs_diff(r.transpose().to_dense(), rd.transpose()) == 0.0);
  CHECK(max_abs_diff(multiply(r, r.transpose()).to_dense(), multiply(rd, rd.transpose())) <= 1e-13);

  const std::vector<std::size_t> pick{4, 0};
  const auto sel = r.select_rows(pick).to_dense();
  for (std::size_t j = 0; j < 40; ++j) {
    CHECK(sel(0, j) == rd(4, j));
    CHECK(sel(1, j) == rd(0, j));
  }
}

TEST_CASE("sparse SPD solve is an exact inverse action") {
  gen::Rng rng(10);
  const auto a = gen::sparse_spd(rng, 120, 300);
  const SpdSolver solver(a);
  const auto d = a.to_dense();
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = gen::vector(rng, 120);
    const auto x = solver.solve(b);
    const auto r = a * x;
    double err = 0.0;
    for (std::size_t i = 0; i < 120; ++i) err = std::max(err, std::abs(r[i] - b[i]));
    CHECK(err <= 1e-12 * (1.0 + norm2(b)));
    if (trial < 5) {
      const auto xd = lu_solve(d, b);
      for (std::size_t i = 0; i < 120; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-10));
    }
  }
  const auto dense_rhs = gen::dense(rng, 120, 3);
  const auto xs = solver.solve(dense_rhs);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto col = solver.solve(dense_rhs.col(j));
    for (std::size_t i = 0; i < 120; ++i) CHECK(xs(i, j) == doctest::Approx(col[i]));
  }
}

TEST_CASE("sparse SPD solve rejects indefinite matrices") {
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, -1.0}};
  CHECK_THROWS_AS(SpdSolver(SparseSym::from_triplets(2, t)), Error);
}

TEST_CASE("indefinite solve on a saddle-point system") {
  gen::Rng rng(11);
  const int n = 30, m = 5;
  const auto a = gen::sparse_spd(rng, n, 40);
  std::vector<Triplet> t;
  for (int r = 0; r < n; ++r)
    for (int c = a.row_ptr()[static_cast<std::size_t>(r)]; c < a.row_ptr()[static_cast<std::size_t>(r) + 1]; ++c)
      t.push_back({r, a.col_idx()[static_cast<std::size_t>(c)], a.values()[static_cast<std::size_t>(c)]});
  for (int p = 0; p < m; ++p)
    for (int k = 0; k < 4; ++k) t.push_back({gen::uniform_int(rng, 0, n - 1), n + p, gen::uniform(rng)});
  const auto k = SparseSym::from_triplets(n + m, t);
  const auto b = gen::vector(rng, static_cast<std::size_t>(n + m));
  const auto x = sparse_solve_sym_indefinite(k, b);
  const auto xd = lu_solve(k.to_dense(), b);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-9));

  std::vector<Triplet> sing{{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}};
  CHECK_THROWS_AS(IndefiniteSolver(SparseSym::from_triplets(2, sing)), Error);
}
