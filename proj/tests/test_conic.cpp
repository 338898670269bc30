#include <random>
#include <sstream>

#include "doctest.h"

#include "consist/conic.hpp"
#include "consist/scalar.hpp"
#include "support/oracles.hpp"

using namespace consist;
using namespace consist::conic;

TEST_CASE("scalar linear program through the conic interface") {
  ConicProblem p;
  const int b = p.add_block(BlockKind::nonnegative, 1);
  LinearForm f;
  f.add(b, 0, 1.0);
  p.add_constraint(f, Relation::equal, 3.0);
  p.set_objective(Sense::minimize, f);
  for (const auto& sol : {solve_sdp(p), solve_lp(p)}) {
    REQUIRE(sol.optimal());
    CHECK(sol.primal_objective == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(sol.blocks[b](0, 0) == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(sol.sensitivity(0) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("trace minimization has the identity as optimum") {
  ConicProblem p;
  const int x = p.add_block(BlockKind::psd, 2);
  p.add_constraint(LinearForm().add(x, 0, 0, 1.0), Relation::equal, 1.0);
  p.add_constraint(LinearForm().add(x, 1, 1, 1.0), Relation::equal, 1.0);
  p.set_objective(Sense::minimize, LinearForm().add(x, 0, 0, 1.0).add(x, 1, 1, 1.0));
  const auto sol = solve_sdp(p);
  REQUIRE(sol.optimal());
  CHECK(sol.primal_objective == doctest::Approx(2.0).epsilon(1e-7));
  CHECK((sol.blocks[x] - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("two-parameter relaxation objective") {
  const Dataset d = load_dataset(std::string(CONSIST_FIXTURES) + "/two_param.json");
  const ScmSdp sdp = scm_sdp_upper(d);
  REQUIRE(sdp.ok());
  CHECK(std::abs(sdp.gamma_upper + 1.0857) < 1e-3);
  // Weak duality of the returned pair.
  CHECK(sdp.solution.dual_objective >= sdp.solution.primal_objective - 1e-6);
}

TEST_CASE("small linear programs") {
  // min d1 + d2 s.t. d >= 0, d1 + d2 >= 1.
  ConicProblem p;
  const int d = p.add_block(BlockKind::nonnegative, 2);
  const LinearForm sum = LinearForm().add(d, 0, 1.0).add(d, 1, 1.0);
  p.add_constraint(sum, Relation::greater_equal, 1.0);
  p.set_objective(Sense::minimize, sum);
  CHECK(solve_lp(p).primal_objective == doctest::Approx(1.0));
  CHECK(solve_sdp(p).primal_objective == doctest::Approx(1.0).epsilon(1e-7));

  // Counterexample with alpha = 4: min max(0, 1.5x + 3) + max(0, -x - 1).
  LinearProgram lp = make_lp(3);
  lp.lower(1) = lp.lower(2) = 0.0;
  lp.c << 0.0, 1.0, 1.0;
  add_row(lp, Eigen::Vector3d(1.5, -1.0, 0.0), Relation::less_equal, 1.0 - 4.0);
  add_row(lp, Eigen::Vector3d(-1.0, 0.0, -1.0), Relation::less_equal, 1.0);
  const LpResult r = solve_linear_program(lp);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(1.0));
}

TEST_CASE("infeasible linear program carries a Farkas certificate") {
  ConicProblem p;
  const int x = p.add_block(BlockKind::free, 1);
  p.add_constraint(LinearForm().add(x, 0, 1.0), Relation::less_equal, 0.0);
  p.add_constraint(LinearForm().add(x, 0, 1.0), Relation::greater_equal, 1.0);
  p.set_objective(Sense::minimize, LinearForm().add(x, 0, 1.0));
  const auto sol = solve_lp(p);
  CHECK(sol.status == SolveStatus::primal_infeasible);
  REQUIRE(sol.farkas.size() == 2);
  // y1 >= 0 on the <= row, y2 <= 0 on the >= row, y'A = 0 and y'b < 0.
  CHECK(sol.farkas(0) >= 0.0);
  CHECK(sol.farkas(1) <= 0.0);
  CHECK(std::abs(sol.farkas(0) + sol.farkas(1)) < 1e-9);
  CHECK(sol.farkas(0) * 0.0 + sol.farkas(1) * 1.0 < 0.0);

  const auto ipm = solve_sdp(p);
  CHECK(ipm.status == SolveStatus::primal_infeasible);
}

TEST_CASE("unbounded problems are reported as dual infeasible") {
  LinearProgram lp = make_lp(1);
  lp.c(0) = -1.0;
  add_row(lp, Vector::Constant(1, -1.0), Relation::less_equal, 0.0);
  CHECK(solve_linear_program(lp).status == SolveStatus::dual_infeasible);
}

TEST_CASE("random feasible SDPs meet the KKT conditions") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  auto random_sym = [&](int d) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    }
    return Matrix(0.5 * (m + m.transpose()));
  };
  auto random_pd = [&](int d) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = g(rng);
    }
    return Matrix(m * m.transpose() / d + 0.1 * Matrix::Identity(d, d));
  };
  int solved = 0;
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + static_cast<int>(rng() % 8);
    const int m = 1 + static_cast<int>(rng() % (d * (d + 1) / 2));
    const Matrix x0 = random_pd(d);
    const Matrix s0 = random_pd(d);
    std::vector<Matrix> a(m);
    Vector y0(m);
    Matrix c = s0;
    ConicProblem p;
    const int blk = p.add_block(BlockKind::psd, d);
    for (int i = 0; i < m; ++i) {
      a[i] = random_sym(d);
      y0(i) = g(rng);
      c += y0(i) * a[i];
      p.add_constraint(LinearForm().add_matrix(blk, 0, a[i]), Relation::equal, (a[i].cwiseProduct(x0)).sum());
    }
    p.set_objective(Sense::minimize, LinearForm().add_matrix(blk, 0, c));
    SolverOptions opt;
    const auto sol = solve_sdp(p, opt);
    REQUIRE_MESSAGE(sol.optimal(), "trial " << t << " status " << to_string(sol.status));
    ++solved;
    CHECK(sol.primal_residual <= opt.feas_tol);
    CHECK(sol.dual_residual <= opt.feas_tol);
    CHECK(sol.gap <= opt.gap_tol);
    CHECK(sol.dual_objective <= sol.primal_objective + opt.gap_tol * (1.0 + std::abs(sol.primal_objective)));

    // Independent recomputation from the returned primal and multipliers.
    const Matrix& x = sol.blocks[blk];
    Matrix s = c;
    for (int i = 0; i < m; ++i) s -= sol.sensitivity(i) * a[i];
    const double scale = 1.0 + c.norm() + x.norm();
    Eigen::SelfAdjointEigenSolver<Matrix> ex(x), es(s);
    CHECK(ex.eigenvalues().minCoeff() >= -1e-7 * scale);
    CHECK(es.eigenvalues().minCoeff() >= -1e-6 * scale);
    CHECK(std::abs((x.cwiseProduct(s)).sum()) <= 1e-6 * scale);
    for (int i = 0; i < m; ++i) {
      CHECK(std::abs((a[i].cwiseProduct(x)).sum() - (a[i].cwiseProduct(x0)).sum()) <= 1e-7 * scale);
    }
  }
  CHECK(solved == 100);
}

TEST_CASE("LP results match vertex enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = static_cast<int>(rng() % (11 - n));  // rows besides the box
    Matrix a(m + 2 * n, n);
    Vector b(m + 2 * n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
      b(i) = u(rng);
    }
    a.bottomRows(2 * n).setZero();
    for (int j = 0; j < n; ++j) {
      a(m + j, j) = 1.0;
      a(m + n + j, j) = -1.0;
      b(m + j) = b(m + n + j) = 2.0;
    }
    Vector c(n);
    for (int j = 0; j < n; ++j) c(j) = u(rng);

    LinearProgram lp = make_lp(n);
    lp.lower = Vector::Constant(n, -2.0);
    lp.upper = Vector::Constant(n, 2.0);
    lp.c = c;
    for (int i = 0; i < m; ++i) add_row(lp, a.row(i).transpose(), Relation::less_equal, b(i));
    const LpResult r = solve_linear_program(lp);
    const auto ref = oracle::vertex_lp(c, a, b);
    if (!ref) {
      CHECK(r.status == SolveStatus::primal_infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(std::abs(r.objective - *ref) <= 1e-7);
    CHECK(((a * r.x - b).array() <= 1e-9).all());
  }
  CHECK(feasible > 50);
}

TEST_CASE("problem validation and sparse dump") {
  ConicProblem p;
  const int x = p.add_block(BlockKind::psd, 2);
  p.add_constraint(LinearForm().add(x, 0, 1, 2.0), Relation::less_equal, 1.0);
  p.set_objective(Sense::maximize, LinearForm().add(x, 1, 1, 1.0));
  std::ostringstream out;
  write_sparse_dump(p, out);
  CHECK(out.str().find("# constraint 0") != std::string::npos);
  CHECK(out.str().find("# constraint -1") != std::string::npos);

  ConicProblem bad;
  bad.add_block(BlockKind::psd, 2);
  bad.add_constraint(LinearForm().add(0, 5, 0, 1.0), Relation::equal, 1.0);
  CHECK_THROWS(bad.validate());
}
