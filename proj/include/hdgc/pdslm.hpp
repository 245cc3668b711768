#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hdgc/design.hpp"
#include "hdgc/panel.hpp"
#include "hdgc/tuning.hpp"

namespace hdgc {

enum class StatKind { LmChi2, LmF, Wald, WaldF, LmHet, BivariateF };

std::string stat_kind_name(StatKind kind);
StatKind stat_kind_from_name(const std::string& name);

/// How Granger-cause columns are treated during the selection steps.
enum class GcHandling { ExcludeThenReinsert, KeepUnpenalized, KeepPenalized };

/// Thrown when too many regressors survive selection for the post-OLS stage
/// (effective rows - |S| - #GC columns < 1, or < 2 for Wald).
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GCTestSpec {
  int target = 0;
  std::vector<int> causes;     ///< one or more candidate cause series
  int lags = 1;                ///< VAR order; ignored for VHAR
  bool vhar = false;
  TuningRule tuning{};
  StatKind statistic = StatKind::LmF;
  double alpha = 0.05;
  GcHandling gc_handling = GcHandling::ExcludeThenReinsert;
};

struct GCTestResult {
  std::string target;              ///< series name
  std::vector<std::string> causes; ///< series names
  double statistic = 0.0;
  double p_value = 1.0;
  StatKind kind = StatKind::LmF;
  int dof_num = 0;                 ///< numerator / chi-squared dof
  long dof_den = -1;               ///< denominator dof, -1 for chi-squared
  long s_star = 0;                 ///< |union of selected sets|
  double r_squared = 0.0;          ///< auxiliary-regression R^2 (LM kinds)
  long effective_rows = 0;
  bool reject = false;
  double alpha = 0.05;
  std::vector<std::vector<std::string>> selected;  ///< labels per step
  std::vector<TuningAudit> audits;                 ///< one per selection step
  int dropped_collinear = 0;       ///< columns dropped from post-OLS stages
};

/// Post-double-selection Granger-causality LM test of "causes -> target".
///
/// Selection runs one lasso of the target on the non-cause columns, then one
/// lasso per cause column on the same candidates; the union S feeds an OLS
/// whose residuals are scored against the cause columns. statistic LmChi2
/// compares T_eff * R^2 with chi-squared(p); LmF uses the F form with
/// denominator dof T_eff - S* - p.
GCTestResult pds_lm_test(const TimeSeriesPanel& panel, const GCTestSpec& spec);

/// Same selection, then a Wald test on the cause coefficients in the OLS of
/// the target on S plus the cause columns (classical covariance).
GCTestResult pds_wald_test(const TimeSeriesPanel& panel,
                           const GCTestSpec& spec);

/// Heteroskedasticity-robust LM variant: scores are formed from products of
/// the restricted residuals with the cause columns' residuals after
/// projecting on S; the statistic is T_eff minus the SSR of regressing a
/// one-vector on those products.
GCTestResult pds_lm_het_robust(const TimeSeriesPanel& panel,
                               const GCTestSpec& spec);

/// Classical bivariate VAR(p) Granger F test on the two-series subsystem,
/// F((SSE_r - SSE_u)/p, SSE_u/(T_eff - 2p - 1)).
GCTestResult bivariate_gc_test(const TimeSeriesPanel& panel, int target,
                               int cause, int p);

/// Dispatch on spec.statistic.
GCTestResult run_gc_test(const TimeSeriesPanel& panel, const GCTestSpec& spec);

/// Rank-aware centered OLS used by the post-selection stages. Columns are
/// centered; rank-deficient inputs drop trailing dependent columns (never one
/// of the first protect_leading columns, which raise instead).
struct OlsResult {
  Eigen::VectorXd beta;    ///< full length, zeros for dropped columns
  Eigen::VectorXd resid;
  double sse = 0.0;
  long rank = 0;
  std::vector<int> dropped;
};
OlsResult ols_centered(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       int protect_leading = 0);

}  // namespace hdgc
