#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hdgc {

/// A multivariate time-series panel: T observations (rows) of K series
/// (columns), with one name per series.
struct TimeSeriesPanel {
  Eigen::MatrixXd data;             ///< T x K, row t = observation at time t
  std::vector<std::string> names;   ///< size K, unique

  long rows() const { return data.rows(); }
  long cols() const { return data.cols(); }

  /// Index of a named series, or -1 if absent.
  long series_index(const std::string& name) const;

  /// Throws std::invalid_argument unless shapes agree, names are unique and
  /// every value is finite.
  void validate() const;
};

/// Convenience: default names s1..sK.
std::vector<std::string> default_series_names(int k);

}  // namespace hdgc
