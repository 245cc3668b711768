#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "hdgc/lasso.hpp"

namespace {

// Deterministic random regression problem.
struct RandomProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

RandomProblem make_problem(long n, long m, unsigned seed,
                           int sparse_support = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RandomProblem p;
  p.X.resize(n, m);
  for (long r = 0; r < n; ++r)
    for (long c = 0; c < m; ++c) p.X(r, c) = gauss(rng);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < sparse_support && j < m; ++j)
    beta(j) = (j % 2 == 0 ? 1.5 : -2.0);
  p.y = p.X * beta;
  for (long r = 0; r < n; ++r) p.y(r) += 0.5 * gauss(rng);
  return p;
}

// Independent proximal-gradient (ISTA) solver for the same objective
//   (1/n)||y - X b||^2 + lambda sum_j w_j |b_j|
// on the standardized problem. Deliberately shares no logic with the
// coordinate-descent implementation under test.
Eigen::VectorXd ista_solve(const hdgc::LassoProblem& prob, double lambda,
                           int max_iter = 500000, double tol = 1e-13) {
  const long m = prob.m();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.gram);
  const double lipschitz = 2.0 * es.eigenvalues().maxCoeff();
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd grad = 2.0 * (prob.gram * beta - prob.xty);
    Eigen::VectorXd next = beta - step * grad;
    double max_delta = 0.0;
    for (long j = 0; j < m; ++j) {
      const double thr = step * lambda * prob.weights(j);
      const double v = next(j);
      next(j) = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
      max_delta = std::max(max_delta, std::abs(next(j) - beta(j)));
    }
    beta.swap(next);
    if (max_delta < tol) break;
  }
  return beta;
}

}  // namespace

TEST_CASE("standardization produces unit-variance columns") {
  const auto rp = make_problem(50, 6, 101);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const long n = prob.n();
  for (long j = 0; j < prob.m(); ++j) {
    CHECK(std::abs(prob.X.col(j).mean()) < 1e-12);
    CHECK(prob.X.col(j).squaredNorm() / double(n) == doctest::Approx(1.0));
    CHECK(prob.gram(j, j) == doctest::Approx(1.0));
    // col_sd is the divisor-n sample SD of the raw column.
    const double mu = rp.X.col(j).mean();
    const double sd = std::sqrt(
        (rp.X.col(j).array() - mu).square().sum() / double(n));
    CHECK(prob.col_sd(j) == doctest::Approx(sd));
  }
  CHECK(std::abs(prob.y.mean()) < 1e-12);
  CHECK(prob.yty == doctest::Approx(prob.y.squaredNorm()));
}

TEST_CASE("degenerate inputs are rejected") {
  const auto rp = make_problem(20, 4, 102);
  Eigen::MatrixXd flat = rp.X;
  flat.col(2).setConstant(3.25);
  CHECK_THROWS_AS(hdgc::LassoProblem::from_raw(flat, rp.y),
                  std::invalid_argument);

  Eigen::VectorXd bad_w = Eigen::VectorXd::Ones(4);
  bad_w(1) = -0.5;
  CHECK_THROWS_AS(hdgc::LassoProblem::from_raw(rp.X, rp.y, bad_w),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      hdgc::LassoProblem::from_raw(rp.X, rp.y, Eigen::VectorXd::Ones(3)),
      std::invalid_argument);

  Eigen::MatrixXd nan_x = rp.X;
  nan_x(0, 0) = std::nan("");
  CHECK_THROWS_AS(hdgc::LassoProblem::from_raw(nan_x, rp.y),
                  std::invalid_argument);
}

TEST_CASE("zero penalty reproduces least squares") {
  const auto rp = make_problem(40, 5, 103);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const auto fit = hdgc::solve(prob, 0.0, nullptr, /*tol=*/1e-11);
  REQUIRE(fit.converged);

  const Eigen::VectorXd ols =
      prob.X.colPivHouseholderQr().solve(prob.y);
  CHECK((fit.beta_std - ols).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(fit.sse == doctest::Approx((prob.y - prob.X * ols).squaredNorm())
                       .epsilon(1e-10));
  CHECK(int(fit.active.size()) == 5);
}

TEST_CASE("penalties at or above the critical value give the zero fit") {
  const auto rp = make_problem(30, 8, 104);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const double lmax = hdgc::lambda_max(prob);
  for (double f : {1.0, 1.0001, 2.0}) {
    const auto fit = hdgc::solve(prob, f * lmax);
    CHECK(fit.beta_std.isZero(0.0));
    CHECK(fit.active.empty());
    CHECK(fit.sse == doctest::Approx(prob.yty));
  }
  const auto below = hdgc::solve(prob, 0.5 * lmax);
  CHECK(!below.active.empty());
}

TEST_CASE("coordinate descent agrees with a proximal-gradient oracle") {
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u}) {
    const auto rp = make_problem(30, 8, 200 + seed);
    std::mt19937_64 wrng(900 + seed);
    std::uniform_real_distribution<double> uw(0.5, 2.0);
    Eigen::VectorXd w(8);
    for (int j = 0; j < 8; ++j) w(j) = uw(wrng);
    const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y, w);
    const double lmax = hdgc::lambda_max(prob);
    for (double frac : {0.5, 0.1, 0.02}) {
      const double lambda = frac * lmax;
      const auto fit = hdgc::solve(prob, lambda);
      REQUIRE(fit.converged);
      const Eigen::VectorXd oracle = ista_solve(prob, lambda);
      const double f_cd = hdgc::lasso_objective(prob, fit.beta_std, lambda);
      const double f_or = hdgc::lasso_objective(prob, oracle, lambda);
      CHECK(f_cd <= f_or + 1e-8);
      CHECK(std::abs(f_cd - f_or) < 1e-7);
      CHECK((fit.beta_std - oracle).cwiseAbs().maxCoeff() < 1e-4);
    }
  }
}

TEST_CASE("every fit on a path satisfies the stationarity conditions") {
  const auto rp = make_problem(60, 25, 105, 5);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const auto grid = hdgc::default_lambda_grid(prob, 60);
  const auto path = hdgc::fit_path(prob, grid);
  REQUIRE(path.fits.size() == grid.size());
  for (size_t i = 0; i < path.fits.size(); ++i) {
    const auto& fit = path.fits[i];
    REQUIRE(fit.converged);
    const double lambda = path.lambdas[i];
    const Eigen::VectorXd q = prob.gram * fit.beta_std;
    for (long j = 0; j < prob.m(); ++j) {
      const double grad = 2.0 * (prob.xty(j) - q(j));
      const double wj = lambda * prob.weights(j);
      if (fit.beta_std(j) != 0.0)
        CHECK(std::abs(grad - wj * (fit.beta_std(j) > 0 ? 1.0 : -1.0)) <=
              1.5e-6);
      else
        CHECK(std::abs(grad) <= wj + 1.5e-6);
    }
  }
}

TEST_CASE("warm starts do not change the solution") {
  const auto rp = make_problem(45, 12, 106);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const auto grid = hdgc::default_lambda_grid(prob, 40);
  const auto path = hdgc::fit_path(prob, grid);
  for (size_t i : {size_t(5), size_t(20), size_t(39)}) {
    const auto cold = hdgc::solve(prob, grid[i]);
    const double f_warm =
        hdgc::lasso_objective(prob, path.fits[i].beta_std, grid[i]);
    const double f_cold = hdgc::lasso_objective(prob, cold.beta_std, grid[i]);
    CHECK(std::abs(f_warm - f_cold) < 1e-9);
    CHECK((path.fits[i].beta_std - cold.beta_std).cwiseAbs().maxCoeff() <
          1e-5);
  }
}

TEST_CASE("column rescaling leaves the standardized fit unchanged") {
  const auto rp = make_problem(35, 6, 107);
  Eigen::MatrixXd scaled = rp.X;
  scaled.col(2) *= 1000.0;
  scaled.col(4) *= 1e-3;
  const auto prob_a = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const auto prob_b = hdgc::LassoProblem::from_raw(scaled, rp.y);
  const double lambda = 0.3 * hdgc::lambda_max(prob_a);
  CHECK(hdgc::lambda_max(prob_b) ==
        doctest::Approx(hdgc::lambda_max(prob_a)).epsilon(1e-12));
  const auto fa = hdgc::solve(prob_a, lambda);
  const auto fb = hdgc::solve(prob_b, lambda);
  CHECK(fa.active == fb.active);
  CHECK((fa.beta_std - fb.beta_std).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(fb.beta(2) == doctest::Approx(fa.beta(2) / 1000.0).epsilon(1e-9));
  CHECK(fb.beta(4) == doctest::Approx(fa.beta(4) * 1000.0).epsilon(1e-9));
  CHECK(fa.sse == doctest::Approx(fb.sse).epsilon(1e-12));
}

TEST_CASE("unpenalized columns are projected out of the critical penalty") {
  const auto rp = make_problem(50, 5, 108);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(5);
  w(0) = 0.0;
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y, w);
  const double lmax = hdgc::lambda_max(prob);
  const auto fit = hdgc::solve(prob, lmax);
  // At the critical penalty only the free column carries a coefficient, and
  // it equals the single-regressor least-squares slope in standardized
  // coordinates (x'x/n = 1 so the slope is x'y/n).
  for (int j = 1; j < 5; ++j) CHECK(fit.beta_std(j) == 0.0);
  CHECK(fit.beta_std(0) == doctest::Approx(prob.xty(0)).epsilon(1e-7));

  Eigen::VectorXd all_zero = Eigen::VectorXd::Zero(5);
  const auto prob0 = hdgc::LassoProblem::from_raw(rp.X, rp.y, all_zero);
  CHECK_THROWS_AS(hdgc::lambda_max(prob0), std::invalid_argument);
}

TEST_CASE("penalty grid endpoints and spacing") {
  const auto rp = make_problem(40, 6, 109);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const auto grid = hdgc::lambda_grid(prob, 25, 1e-3);
  REQUIRE(grid.size() == 25);
  const double lmax = hdgc::lambda_max(prob);
  CHECK(grid.front() == lmax);
  CHECK(grid.back() == doctest::Approx(1e-3 * lmax).epsilon(1e-12));
  for (size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] < grid[i - 1]);
    // log-spacing: constant ratio between neighbours
    CHECK(grid[i] / grid[i - 1] ==
          doctest::Approx(grid[1] / grid[0]).epsilon(1e-10));
  }
  // n > m picks the small default floor, n <= m the larger one.
  CHECK(hdgc::default_lambda_grid(prob, 10).back() ==
        doctest::Approx(1e-4 * lmax).epsilon(1e-10));
  const auto wide = make_problem(8, 12, 110);
  const auto prob_wide = hdgc::LassoProblem::from_raw(wide.X, wide.y);
  CHECK(hdgc::default_lambda_grid(prob_wide, 10).back() ==
        doctest::Approx(1e-2 * hdgc::lambda_max(prob_wide)).epsilon(1e-10));
}

TEST_CASE("path fitting stops once the active cap is exceeded") {
  const auto rp = make_problem(50, 20, 111, 20);
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y);
  const auto grid = hdgc::default_lambda_grid(prob, 80);
  const int cap = 6;
  const auto path = hdgc::fit_path(prob, grid, cap);
  REQUIRE(!path.fits.empty());
  CHECK(path.fits.size() < grid.size());
  // Every kept fit except the boundary one respects the cap; the boundary
  // fit is preserved so callers can see where the cap bit.
  for (size_t i = 0; i + 1 < path.fits.size(); ++i)
    CHECK(int(path.fits[i].active.size()) <= cap);
  CHECK(int(path.fits.back().active.size()) > cap);
}

TEST_CASE("adaptive weights invert pilot magnitudes") {
  hdgc::LassoFit pilot;
  pilot.beta_std.resize(3);
  pilot.beta_std << 2.0, 0.0, -0.5;
  const Eigen::VectorXd w = hdgc::adaptive_weights(pilot, 1.0, 1e-4);
  CHECK(w(0) == doctest::Approx(0.5));
  CHECK(w(1) == doctest::Approx(1e4));
  CHECK(w(2) == doctest::Approx(2.0));
  const Eigen::VectorXd w2 = hdgc::adaptive_weights(pilot, 2.0, 1e-4);
  CHECK(w2(0) == doctest::Approx(0.25));
  CHECK(w2(2) == doctest::Approx(4.0));
}

TEST_CASE("objective helper matches a direct evaluation") {
  const auto rp = make_problem(25, 4, 112);
  Eigen::VectorXd w(4);
  w << 1.0, 0.5, 2.0, 1.5;
  const auto prob = hdgc::LassoProblem::from_raw(rp.X, rp.y, w);
  Eigen::VectorXd beta(4);
  beta << 0.3, -1.2, 0.0, 0.7;
  const double direct =
      (prob.y - prob.X * beta).squaredNorm() / double(prob.n()) +
      0.37 * (1.0 * 0.3 + 0.5 * 1.2 + 2.0 * 0.0 + 1.5 * 0.7);
  CHECK(hdgc::lasso_objective(prob, beta, 0.37) ==
        doctest::Approx(direct).epsilon(1e-12));
}
