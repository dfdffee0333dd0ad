#include "mrxi/errors.hpp"
#include "mrxi/solvers.hpp"

#include "criteria.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mrxi;

namespace {

AdmmParams tight(double alpha, std::size_t iterations = 20000) {
  AdmmParams p;
  p.alpha = alpha;
  p.max_iterations = iterations;
  p.primal_tolerance = 1e-10;
  p.dual_tolerance = 1e-10;
  p.history_stride = 50;
  return p;
}

}  // namespace

TEST_CASE("soft thresholding") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  // exact ties resolve to zero
  CHECK(soft_threshold(1.0, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = d(rng), t = std::abs(d(rng));
    const double expect = (z > 0 ? 1.0 : -1.0) * std::max(std::abs(z) - t, 0.0);
    CHECK(soft_threshold(z, t) == expect);
  }
}

TEST_CASE("Tikhonov closed form") {
  SUBCASE("identity operator") {
    const Vector g = (Vector(5) << 1.0, -2.0, 0.5, 3.0, -0.25).finished();
    const double alpha = 0.35;
    const SolverReport r = solve_tikhonov(Matrix::Identity(5, 5), g, alpha, false);
    CHECK((r.solution - g / (1.0 + 2.0 * alpha)).norm() < 1e-15);
    CHECK(r.termination == Termination::ClosedForm);
    REQUIRE(r.normal_residual);
    CHECK(*r.normal_residual < 1e-10);
  }
  SUBCASE("random operators against a direct normal-equation solve") {
    const auto v = criteria::tikhonov_direct(50, 2024);
    INFO(v.detail);
    CHECK(v.pass);
  }
  SUBCASE("wide and tall operators share the result across strategies") {
    std::mt19937_64 rng(3);
    for (auto [m, n] : {std::pair{15, 40}, std::pair{40, 15}}) {
      const Matrix K = criteria::random_matrix(rng, m, n);
      const Vector g = criteria::random_vector(rng, m);
      const Vector ref = TikhonovSolver(K, SystemStrategy::Direct).solve(g, 0.01, false).solution;
      for (auto s : {SystemStrategy::Auto, SystemStrategy::Woodbury, SystemStrategy::ConjugateGradient}) {
        const Vector x = TikhonovSolver(K, s).solve(g, 0.01, false).solution;
        CAPTURE(m);
        CAPTURE(static_cast<int>(s));
        // CG stops on a 1e-10 relative residual; its error carries the condition number
        const double tol = s == SystemStrategy::ConjugateGradient ? 1e-6 : 1e-8;
        CHECK((x - ref).norm() <= tol * ref.norm());
      }
    }
  }
}

TEST_CASE("Tikhonov with positivity") {
  SUBCASE("vanishing alpha projects onto the orthant") {
    const Vector g = (Vector(6) << 1.0, -2.0, 0.5, -0.1, 3.0, 0.0).finished();
    AdmmParams p = tight(0.0);
    const SolverReport r = solve_tikhonov(Matrix::Identity(6, 6), g, 1e-9, true, p);
    CHECK((r.solution - g.cwiseMax(0.0)).norm() < 1e-6);
    CHECK(r.solution.minCoeff() >= 0.0);
  }
  SUBCASE("KKT conditions of the constrained problem") {
    std::mt19937_64 rng(8);
    const Matrix K = criteria::random_matrix(rng, 12, 20);
    const Vector g = criteria::random_vector(rng, 12);
    const double alpha = 0.05;
    const Vector c = solve_tikhonov(K, g, alpha, true, tight(alpha)).solution;
    CHECK(c.minCoeff() >= 0.0);
    // gradient of the smooth part: nonnegative on the active set, zero on the free set
    const Vector grad = K.transpose() * (K * c - g) + 2.0 * alpha * c;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (c[i] > 1e-6) {
        CHECK(std::abs(grad[i]) < 1e-5);
      } else {
        CHECK(grad[i] > -1e-5);
      }
    }
  }
  CHECK_THROWS_AS(solve_tikhonov(Matrix::Identity(3, 3), Vector::Ones(3), 0.0, false), ConfigError);
  CHECK_THROWS_AS(solve_tikhonov(Matrix::Identity(3, 3), Vector::Ones(4), 0.1, false), ConfigError);
}

TEST_CASE("TV-ADMM reduces to a projection at zero alpha") {
  const Vector g = (Vector(7) << 0.3, -1.0, 2.0, -0.5, 0.0, 1.5, -3.0).finished();
  AdmmParams p = tight(0.0);
  const SolverReport r = solve_tv_admm(Matrix::Identity(7, 7), g, {7, 1, 1}, p);
  CHECK((r.solution - g.cwiseMax(0.0)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("TV-ADMM matches exact 1D TV denoising") {
  const auto v = criteria::taut_string(20, 200, 77);
  INFO(v.detail);
  CHECK(v.pass);
}

TEST_CASE("taut-string oracle sanity") {
  // lambda = 0 returns the input; huge lambda returns the mean
  const std::vector<double> y{1.0, 4.0, -2.0, 3.0};
  CHECK(oracle::tv1d_denoise(y, 0.0) == y);
  for (double v : oracle::tv1d_denoise(y, 100.0)) CHECK(v == doctest::Approx(1.5));
  // a clean two-level step keeps its jump minus 2 lambda / segment length
  std::vector<double> step(10, 0.0);
  std::fill(step.begin() + 5, step.end(), 1.0);
  const auto x = oracle::tv1d_denoise(step, 0.5);
  CHECK(x[0] == doctest::Approx(0.1));
  CHECK(x[9] == doctest::Approx(0.9));
}

TEST_CASE("TV-ADMM matches a brute-force lattice minimum") {
  const auto v = criteria::lattice(8, 5);
  INFO(v.detail);
  CHECK(v.pass);
}

TEST_CASE("TV-ADMM feasibility, nonnegativity and report contents") {
  std::mt19937_64 rng(12);
  const Matrix K = criteria::random_matrix(rng, 30, 48);
  const Vector g = criteria::random_vector(rng, 30);
  AdmmParams p = tight(0.1, 5000);
  p.primal_tolerance = p.dual_tolerance = 1e-8;
  p.history_stride = 7;
  const SolverReport r = solve_tv_admm(K, g, {8, 6, 1}, p);
  CHECK(r.converged());
  CHECK(r.solution.minCoeff() >= 0.0);
  CHECK(r.primal_residual.size() == r.iterations);
  CHECK(r.dual_residual.size() == r.iterations);
  CHECK(r.history_iterations.back() == r.iterations);
  for (std::size_t i = 0; i + 1 < r.history_iterations.size(); ++i) CHECK(r.history_iterations[i] % 7 == 0);
  CHECK(r.objective.size() == r.history_iterations.size());
  for (double x : r.primal_residual) CHECK(std::isfinite(x));
  CHECK(r.primal_residual.back() <= 1e-8 * std::sqrt(static_cast<double>(2 * 48 + 48)) * 10.0 + 1e-6);
  CHECK(r.final_objective == doctest::Approx(tv_objective(K, g, GradientOperator({8, 6, 1}), r.solution, 0.1)));
  CHECK(r.parameters.at("alpha") == 0.1);
  CHECK(r.parameters.at("rho") == 1.0);
}

TEST_CASE("isotropic TV is supported") {
  std::mt19937_64 rng(13);
  const Matrix K = criteria::random_matrix(rng, 20, 25);
  const Vector g = criteria::random_vector(rng, 20);
  AdmmParams p = tight(0.2, 5000);
  p.flavor = TvFlavor::Isotropic;
  const SolverReport iso = solve_tv_admm(K, g, {5, 5, 1}, p);
  CHECK(iso.converged());
  const GradientOperator grad({5, 5, 1});
  // small perturbations cannot lower the isotropic objective
  const double f = tv_objective(K, g, grad, iso.solution, 0.2, TvFlavor::Isotropic);
  for (int t = 0; t < 50; ++t) {
    const Vector trial = (iso.solution + 1e-3 * criteria::random_vector(rng, 25)).cwiseMax(0.0);
    CHECK(tv_objective(K, g, grad, trial, 0.2, TvFlavor::Isotropic) >= f - 1e-9);
  }
}

TEST_CASE("larger alpha never increases total variation") {
  std::mt19937_64 rng(4);
  const Matrix K = criteria::random_matrix(rng, 40, 36);
  const Vector truth = criteria::random_vector(rng, 36, 0.0, 1.0);
  const Vector g = K * truth;
  const GradientOperator grad({6, 6, 1});
  const TvAdmmSolver solver(K, {6, 6, 1}, 1.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double alpha : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    const Vector c = solver.solve(g, tight(alpha)).solution;
    const double tv = grad.total_variation(c);
    CHECK(tv <= previous + 1e-6);
    previous = tv;
  }
}

TEST_CASE("solvers are deterministic") {
  std::mt19937_64 rng(6);
  const Matrix K = criteria::random_matrix(rng, 20, 30);
  const Vector g = criteria::random_vector(rng, 20);
  const SolverReport a = solve_tv_admm(K, g, {6, 5, 1}, tight(0.1, 300));
  const SolverReport b = solve_tv_admm(K, g, {6, 5, 1}, tight(0.1, 300));
  CHECK(a.solution == b.solution);
  CHECK(a.objective == b.objective);
  CHECK(a.primal_residual == b.primal_residual);
}

TEST_CASE("ADMM parameter validation") {
  const Matrix K = Matrix::Identity(4, 4);
  const Vector g = Vector::Ones(4);
  AdmmParams p;
  p.rho = 0.0;
  CHECK_THROWS_AS(solve_tv_admm(K, g, {4, 1, 1}, p), ConfigError);
  p = {};
  p.alpha = -1.0;
  CHECK_THROWS_AS(solve_tv_admm(K, g, {4, 1, 1}, p), ConfigError);
  p = {};
  p.primal_tolerance = 0.0;
  CHECK_THROWS_AS(solve_tv_admm(K, g, {4, 1, 1}, p), ConfigError);
  const TvAdmmSolver solver(K, {4, 1, 1}, 1.0);
  p = {};
  p.rho = 2.0;
  CHECK_THROWS_AS(solver.solve(g, p), ConfigError);
  CHECK_THROWS_AS(solve_tv_admm(K, g, {5, 1, 1}, AdmmParams{}), ConfigError);
}

TEST_CASE("Bregman iteration") {
  const int n = 10;
  const Matrix K = criteria::blur(n, 1.2);
  Vector truth = Vector::Zero(n);
  truth.segment(3, 4).setConstant(2.0);
  const Vector g = K * truth;

  SUBCASE("one outer step is a plain TV solve") {
    BregmanParams bp;
    bp.alpha = 0.5;
    bp.inner = tight(0.5, 3000);
    bp.max_outer = 1;
    const SolverReport br = solve_bregman(K, g, {n, 1, 1}, bp);
    const SolverReport tv = solve_tv_admm(K, g, {n, 1, 1}, tight(0.5, 3000));
    CHECK(br.solution == tv.solution);
    CHECK(br.termination == Termination::MaxOuterIterations);
    CHECK(br.outer_misfit.size() == 1);
  }
  SUBCASE("misfit falls monotonically on noiseless data") {
    BregmanParams bp;
    bp.alpha = 1.0;
    bp.inner = tight(1.0, 5000);
    bp.max_outer = 12;
    const SolverReport br = solve_bregman(K, g, {n, 1, 1}, bp);
    REQUIRE(br.outer_misfit.size() == 12);
    for (std::size_t k = 1; k < br.outer_misfit.size(); ++k) CHECK(br.outer_misfit[k] <= br.outer_misfit[k - 1] + 1e-9);
    CHECK(br.outer_misfit.back() < 0.1 * br.outer_misfit.front());
  }
  SUBCASE("discrepancy stopping and selection") {
    BregmanParams bp;
    bp.alpha = 1.0;
    bp.inner = tight(1.0, 5000);
    bp.max_outer = 50;
    bp.noise_level = 0.05;
    const SolverReport at = solve_bregman(K, g, {n, 1, 1}, bp);
    CHECK(at.termination == Termination::Discrepancy);
    CHECK(at.final_misfit <= 1.02 * 0.05);
    bp.selection = BregmanSelection::BeforeThreshold;
    const SolverReport before = solve_bregman(K, g, {n, 1, 1}, bp);
    CHECK(before.final_misfit > 1.02 * 0.05);
    CHECK(before.outer_misfit == at.outer_misfit);
  }
  SUBCASE("validation") {
    BregmanParams bp;
    bp.alpha = 0.0;
    CHECK_THROWS_AS(solve_bregman(K, g, {n, 1, 1}, bp), ConfigError);
    bp.alpha = 1.0;
    bp.max_outer = 0;
    CHECK_THROWS_AS(solve_bregman(K, g, {n, 1, 1}, bp), ConfigError);
  }
}

TEST_CASE("Bregman recovers step height better than one TV solve at equal misfit") {
  const criteria::Verdict v = criteria::bregman_bias(20);
  INFO(v.detail);
  CHECK(v.pass);
}
