#include "hdgc/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdgc {

namespace {

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("lasso: non-finite value in inputs");
}

}  // namespace

LassoProblem LassoProblem::from_raw(const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& weights) {
  const long n = X.rows();
  const long m = X.cols();
  if (n != y.size())
    throw std::invalid_argument("lasso: X rows and y length differ");
  if (n < 2) throw std::invalid_argument("lasso: need at least 2 rows");
  if (m < 1) throw std::invalid_argument("lasso: need at least 1 column");
  check_finite(X, y);
  if (weights.size() != m)
    throw std::invalid_argument("lasso: weight vector has wrong length");
  if ((weights.array() < 0).any())
    throw std::invalid_argument("lasso: negative penalty weight");
  if (!weights.allFinite())
    throw std::invalid_argument("lasso: non-finite penalty weight");

  LassoProblem prob;
  prob.weights = weights;
  prob.col_mean = X.colwise().mean();
  prob.X = X.rowwise() - prob.col_mean.transpose();
  // Sample SD with divisor n, so standardized columns satisfy x'x = n.
  prob.col_sd = (prob.X.colwise().squaredNorm() / double(n)).cwiseSqrt();
  for (long j = 0; j < m; ++j) {
    if (prob.col_sd(j) <= 1e-12 * std::max(1.0, std::abs(prob.col_mean(j))))
      throw std::invalid_argument(
          "lasso: column " + std::to_string(j) + " has zero variance");
    prob.X.col(j) /= prob.col_sd(j);
  }
  prob.y_mean = y.mean();
  prob.y = y.array() - prob.y_mean;
  prob.yty = prob.y.squaredNorm();
  prob.gram.noalias() = prob.X.transpose() * prob.X / double(n);
  prob.xty.noalias() = prob.X.transpose() * prob.y / double(n);
  return prob;
}

LassoProblem LassoProblem::from_raw(const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& y) {
  return from_raw(X, y, Eigen::VectorXd::Ones(X.cols()));
}

double lasso_objective(const LassoProblem& prob,
                       const Eigen::VectorXd& beta_std, double lambda) {
  const double sse = (prob.y - prob.X * beta_std).squaredNorm();
  return sse / double(prob.n()) +
         lambda * (prob.weights.array() * beta_std.array().abs()).sum();
}

LassoFit solve(const LassoProblem& prob, double lambda,
               const Eigen::VectorXd* warm_start_std, double tol,
               int max_sweeps) {
  if (!(lambda >= 0) || !std::isfinite(lambda))
    throw std::invalid_argument("lasso: lambda must be finite and >= 0");
  if (!(tol > 0)) throw std::invalid_argument("lasso: tol must be > 0");
  if (max_sweeps < 1)
    throw std::invalid_argument("lasso: max_sweeps must be >= 1");

  const long m = prob.m();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  if (warm_start_std) {
    if (warm_start_std->size() != m)
      throw std::invalid_argument("lasso: warm start has wrong length");
    beta = *warm_start_std;
  }

  // q = (X'X/n) beta, maintained incrementally: each coordinate update is
  // O(m) independent of the sample size.
  Eigen::VectorXd q = prob.gram * beta;
  const double kkt_slack = 10.0 * tol;

  int sweep = 0;
  bool converged = false;
  while (sweep < max_sweeps) {
    ++sweep;
    double max_delta = 0.0;
    for (long j = 0; j < m; ++j) {
      const double old = beta(j);
      // gram(j, j) == 1 by standardization; kept explicit so the update stays
      // valid if that ever changes.
      const double gjj = prob.gram(j, j);
      const double rho = prob.xty(j) - q(j) + gjj * old;
      const double updated =
          soft_threshold(rho, lambda * prob.weights(j) / 2) / gjj;
      if (updated != old) {
        beta(j) = updated;
        q.noalias() += prob.gram.col(j) * (updated - old);
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    if (max_delta < tol) {
      // Verify stationarity before declaring victory: the gradient of the
      // smooth part is 2(q - xty).
      bool ok = true;
      for (long j = 0; j < m && ok; ++j) {
        const double grad = 2.0 * (prob.xty(j) - q(j));
        const double w = lambda * prob.weights(j);
        if (beta(j) != 0.0)
          ok = std::abs(grad - w * (beta(j) > 0 ? 1.0 : -1.0)) <= kkt_slack;
        else
          ok = std::abs(grad) <= w + kkt_slack;
      }
      if (ok) {
        converged = true;
        break;
      }
    }
  }

  LassoFit fit;
  fit.lambda = lambda;
  fit.beta_std = beta;
  fit.beta = beta.array() / prob.col_sd.array();
  fit.sweeps = sweep;
  fit.converged = converged;
  fit.sse = (prob.y - prob.X * beta).squaredNorm();
  for (long j = 0; j < m; ++j)
    if (beta(j) != 0.0) fit.active.push_back(int(j));
  return fit;
}

double lambda_max(const LassoProblem& prob) {
  const long m = prob.m();
  std::vector<long> free_cols;
  for (long j = 0; j < m; ++j)
    if (prob.weights(j) == 0.0) free_cols.push_back(j);
  if (long(free_cols.size()) == m)
    throw std::invalid_argument("lambda_max: every weight is zero");

  Eigen::VectorXd score = prob.xty;
  if (!free_cols.empty()) {
    // Unpenalized columns enter every model; what matters is the correlation
    // with y after they have absorbed their share.
    Eigen::MatrixXd X0(prob.n(), long(free_cols.size()));
    for (size_t i = 0; i < free_cols.size(); ++i)
      X0.col(long(i)) = prob.X.col(free_cols[i]);
    const Eigen::VectorXd b0 = X0.colPivHouseholderQr().solve(prob.y);
    const Eigen::VectorXd resid = prob.y - X0 * b0;
    score.noalias() = prob.X.transpose() * resid / double(prob.n());
  }

  double best = 0.0;
  for (long j = 0; j < m; ++j)
    if (prob.weights(j) > 0.0)
      best = std::max(best, 2.0 * std::abs(score(j)) / prob.weights(j));
  return best;
}

std::vector<double> lambda_grid(const LassoProblem& prob, int n_lambda,
                                double ratio) {
  if (n_lambda < 1)
    throw std::invalid_argument("lambda_grid: n_lambda must be >= 1");
  if (!(ratio > 0 && ratio <= 1))
    throw std::invalid_argument("lambda_grid: ratio must be in (0, 1]");
  const double top = lambda_max(prob);
  if (top <= 0.0) return {0.0};
  if (n_lambda == 1) return {top};
  std::vector<double> grid(static_cast<size_t>(n_lambda), 0.0);
  const double log_top = std::log(top);
  const double log_ratio = std::log(ratio);
  for (int i = 0; i < n_lambda; ++i)
    grid[size_t(i)] = std::exp(log_top + log_ratio * i / (n_lambda - 1));
  grid.front() = top;  // exact endpoints
  grid.back() = top * ratio;
  return grid;
}

std::vector<double> default_lambda_grid(const LassoProblem& prob,
                                        int n_lambda) {
  const double ratio = prob.n() > prob.m() ? 1e-4 : 1e-2;
  return lambda_grid(prob, n_lambda, ratio);
}

LassoPath fit_path(const LassoProblem& prob, const std::vector<double>& lambdas,
                   int active_cap, double tol, int max_sweeps) {
  LassoPath path;
  path.lambdas.reserve(lambdas.size());
  path.fits.reserve(lambdas.size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(prob.m());
  for (double lambda : lambdas) {
    LassoFit fit = solve(prob, lambda, &warm, tol, max_sweeps);
    warm = fit.beta_std;
    const long active = long(fit.active.size());
    path.lambdas.push_back(lambda);
    path.fits.push_back(std::move(fit));
    if (active_cap >= 0 && active > active_cap) break;
  }
  return path;
}

Eigen::VectorXd adaptive_weights(const LassoFit& pilot, double gamma,
                                 double zero_floor) {
  if (!(gamma > 0)) throw std::invalid_argument("adaptive: gamma must be > 0");
  if (!(zero_floor > 0))
    throw std::invalid_argument("adaptive: zero_floor must be > 0");
  Eigen::VectorXd w(pilot.beta_std.size());
  for (long j = 0; j < w.size(); ++j)
    w(j) = 1.0 /
           std::pow(std::max(std::abs(pilot.beta_std(j)), zero_floor), gamma);
  return w;
}

}  // namespace hdgc
