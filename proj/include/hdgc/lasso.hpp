#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hdgc {

/// A weighted lasso problem
///
///   min_beta (1/n) ||y - X beta||^2 + lambda * sum_j w_j |beta_j|
///
/// held in standardized form: columns scaled to unit sample SD (divisor n)
/// and centered, y centered. Weights are interpreted in the standardized
/// coordinates. The Gram matrix X'X/n and moment vector X'y/n are cached so
/// coordinate descent costs O(m) per update regardless of n.
struct LassoProblem {
  Eigen::MatrixXd X;         ///< standardized design, n x m
  Eigen::VectorXd y;         ///< centered response
  Eigen::VectorXd weights;   ///< m, >= 0, not all zero
  Eigen::VectorXd col_mean;  ///< original column means
  Eigen::VectorXd col_sd;    ///< original column SDs (divisor n)
  double y_mean = 0.0;
  double yty = 0.0;          ///< ||y||^2 after centering
  Eigen::MatrixXd gram;      ///< X'X / n
  Eigen::VectorXd xty;       ///< X'y / n

  long n() const { return X.rows(); }
  long m() const { return X.cols(); }

  /// Builds the standardized problem from raw inputs. Throws
  /// std::invalid_argument on NaN/Inf, zero-variance columns, n < 2 or a
  /// weight vector of the wrong size / with negatives.
  static LassoProblem from_raw(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y,
                               const Eigen::VectorXd& weights);
  static LassoProblem from_raw(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y);
};

struct LassoFit {
  Eigen::VectorXd beta;       ///< coefficients on the original column scale
  Eigen::VectorXd beta_std;   ///< coefficients on the standardized scale
  std::vector<int> active;    ///< indices with beta != 0, ascending
  double lambda = 0.0;
  double sse = 0.0;           ///< ||y - X beta||^2 on the standardized problem
  int sweeps = 0;
  bool converged = false;
};

/// (1/n)||y - X b||^2 + lambda sum w|b| on the standardized problem; used by
/// tests and the solver's internals.
double lasso_objective(const LassoProblem& prob, const Eigen::VectorXd& beta_std,
                       double lambda);

/// Cyclic coordinate descent with soft thresholding. A sweep updates every
/// coordinate once; convergence is declared when the largest coefficient
/// change in a sweep is < tol and the KKT conditions hold within 10*tol.
/// Returns converged = false (with the last iterate) if max_sweeps is hit.
LassoFit solve(const LassoProblem& prob, double lambda,
               const Eigen::VectorXd* warm_start_std = nullptr,
               double tol = 1e-7, int max_sweeps = 100000);

/// Smallest lambda with an all-zero solution:
/// max_j |(2/n) x_j' y| / w_j over penalized columns, after projecting y on
/// any unpenalized (w_j = 0) columns. Throws if every weight is zero.
double lambda_max(const LassoProblem& prob);

/// n_lambda log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(const LassoProblem& prob, int n_lambda,
                                double ratio);

/// Grid with the glmnet-style default ratio: 1e-4 when n > m, else 1e-2.
std::vector<double> default_lambda_grid(const LassoProblem& prob,
                                        int n_lambda = 100);

struct LassoPath {
  std::vector<double> lambdas;  ///< descending
  std::vector<LassoFit> fits;   ///< aligned with lambdas
};

/// Fits the whole grid with warm starts. If active_cap >= 0 the path stops
/// early once a fit's active set exceeds the cap (that fit is kept so callers
/// can see the boundary).
LassoPath fit_path(const LassoProblem& prob, const std::vector<double>& lambdas,
                   int active_cap = -1, double tol = 1e-7,
                   int max_sweeps = 100000);

/// Adaptive-lasso weights w_j = 1 / max(|beta_j|, zero_floor)^gamma from a
/// pilot fit (standardized scale).
Eigen::VectorXd adaptive_weights(const LassoFit& pilot, double gamma = 1.0,
                                 double zero_floor = 1e-4);

}  // namespace hdgc
