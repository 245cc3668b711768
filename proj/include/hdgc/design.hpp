#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hdgc/panel.hpp"

namespace hdgc {

enum class DesignKind { Var, Vhar };

/// Provenance of one design column.
struct ColumnInfo {
  int series = 0;      ///< 0-based source series
  int lag = 0;         ///< VAR: lag 1..p; VHAR: 1 = daily, 2 = weekly, 3 = monthly
  std::string label;   ///< e.g. "s3.L2" or "vix.week"
};

/// A lagged regression design for one target equation.
///
/// X holds raw (uncentered, unscaled) lagged values; regressions standardize
/// or center at fit time, which keeps the construction free of any
/// full-sample statistics. Row r of X uses only observations strictly before
/// the time of y(r).
struct DesignMatrix {
  Eigen::MatrixXd X;               ///< T_eff x m
  Eigen::VectorXd y;               ///< T_eff
  DesignKind kind = DesignKind::Var;
  int lag_order = 1;               ///< p for VAR, 22-day window for VHAR
  int target = 0;                  ///< target series index
  std::vector<int> cause_series;   ///< Granger-cause candidate series
  std::vector<ColumnInfo> columns; ///< per-column provenance, size m
  std::vector<int> gc_cols;        ///< columns belonging to cause_series
  std::vector<int> rest_cols;      ///< complement of gc_cols, ascending

  long effective_rows() const { return X.rows(); }
  long n_cols() const { return X.cols(); }
};

/// VAR(p) design for the target equation. Columns are ordered series-major,
/// lag-minor (s1.L1..s1.Lp, s2.L1, ...), so each series' block is contiguous.
/// Requires T > p, p >= 1, valid distinct indices.
DesignMatrix build_var_design(const TimeSeriesPanel& panel, int target,
                              const std::vector<int>& causes, int p);
DesignMatrix build_var_design(const TimeSeriesPanel& panel, int target,
                              int cause, int p);

/// VHAR design: per series a daily lag y_{t-1}, a weekly average of
/// y_{t-5..t-1} and a monthly average of y_{t-22..t-1}. Requires T > 22.
DesignMatrix build_vhar_design(const TimeSeriesPanel& panel, int target,
                               const std::vector<int>& causes);
DesignMatrix build_vhar_design(const TimeSeriesPanel& panel, int target,
                               int cause);

}  // namespace hdgc
