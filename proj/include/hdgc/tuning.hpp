#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdgc/lasso.hpp"

namespace hdgc {

enum class TuneKind { Aic, Bic, Ebic, Plugin, Tscv, Fixed };

std::string tune_kind_name(TuneKind kind);
TuneKind tune_kind_from_name(const std::string& name);

/// Thrown when the penalty lower bound leaves no admissible grid point.
struct bound_infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// How a penalty level is chosen for one lasso regression.
struct TuningRule {
  TuneKind kind = TuneKind::Bic;

  double ebic_gamma = 0.5;

  double plugin_alpha = 0.05;
  double plugin_c = 0.5;
  int plugin_max_updates = 15;

  int tscv_folds = 5;
  double tscv_min_train_fraction = 0.5;

  double fixed_lambda = 0.0;

  /// Penalty lower bound: grid points whose active set exceeds
  /// floor(lower_bound_fraction * n) are inadmissible. Applied to every kind
  /// except Fixed when enforce_bound is set.
  bool enforce_bound = true;
  double lower_bound_fraction = 0.5;

  int n_lambda = 100;
  double grid_ratio = 0.0;  ///< 0 = default (1e-4 if n > m else 1e-2)

  bool adaptive = false;       ///< adaptive-lasso reweighting from a pilot fit
  double adaptive_gamma = 1.0;
  double adaptive_zero_floor = 1e-4;

  static TuningRule aic();
  static TuningRule bic();
  static TuningRule ebic(double gamma = 0.5);
  static TuningRule plugin();
  static TuningRule tscv();
  static TuningRule fixed(double lambda);
};

/// Everything a caller might want to audit about one tuning decision.
struct TuningAudit {
  std::string rule;
  double chosen_lambda = 0.0;
  int chosen_index = -1;
  std::vector<double> grid;
  std::vector<double> criterion;     ///< IC value or total CV SSE per point
  std::vector<int> active_counts;    ///< per grid point
  std::vector<char> admissible;      ///< per grid point, after the bound
  bool bound_enforced = false;
  int bound_cap = -1;
  std::vector<double> sigma_updates; ///< plug-in iteration trace
  Eigen::MatrixXd fold_sse;          ///< TSCV: folds x grid
};

/// Additive IC penalty weight C_T: 2 (AIC), ln n (BIC),
/// ln n + 2 gamma ln(m_total) (EBIC).
double ic_penalty(TuneKind kind, long n, long m_total, double ebic_gamma);

/// Keeps the grid points whose active-set size is within
/// floor(fraction * n); the largest-lambda point always survives.
LassoPath penalty_lower_bound(const LassoPath& path, long n, double fraction);

/// IC selection over a fitted path: criterion = ln(SSE/n) + C_T * df / n with
/// df = #active, SSE from the lasso fit. Ties go to the larger lambda.
/// Throws bound_infeasible_error if no admissible point exists.
std::pair<double, TuningAudit> select_ic(const LassoPath& path,
                                         const TuningRule& rule, long n,
                                         long m_total);

/// Iterated plug-in penalty
///   lambda = 2 c sigma_hat n^{-1/2} Phi^{-1}(1 - alpha / (2m)),
/// starting from a 5-regressor OLS estimate of sigma and refitting until
/// lambda moves < 1% or max_updates is reached.
std::pair<double, TuningAudit> lambda_plugin(const LassoProblem& prob,
                                             const TuningRule& rule);

/// Rolling-origin cross validation on raw rows: expanding training window,
/// per-fold standardization from training rows only, out-of-sample SSE summed
/// over folds, minimized over the shared grid (admissible points only).
std::pair<double, TuningAudit> select_tscv(const Eigen::MatrixXd& X_raw,
                                           const Eigen::VectorXd& y_raw,
                                           const Eigen::VectorXd& weights,
                                           const std::vector<double>& grid,
                                           const std::vector<char>& admissible,
                                           const TuningRule& rule);

struct SelectedFit {
  LassoFit fit;
  TuningAudit audit;
};

/// One-stop entry: builds the standardized problem from raw columns, applies
/// the rule (grid + bound + criterion, or plug-in iteration, or fixed
/// lambda), returns the fit at the chosen penalty plus the audit trail.
SelectedFit tune_and_fit(const Eigen::MatrixXd& X_raw,
                         const Eigen::VectorXd& y_raw, const TuningRule& rule,
                         const Eigen::VectorXd* weights = nullptr);

}  // namespace hdgc
