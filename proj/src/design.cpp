#include "hdgc/design.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace hdgc {

namespace {

void check_series_args(const TimeSeriesPanel& panel, int target,
                       const std::vector<int>& causes) {
  panel.validate();
  const long k = panel.cols();
  if (target < 0 || target >= k)
    throw std::invalid_argument("design: target index out of range");
  if (causes.empty())
    throw std::invalid_argument("design: need at least one cause series");
  std::unordered_set<int> seen;
  for (int c : causes) {
    if (c < 0 || c >= k)
      throw std::invalid_argument("design: cause index out of range");
    if (c == target)
      throw std::invalid_argument("design: cause equals target");
    if (!seen.insert(c).second)
      throw std::invalid_argument("design: duplicate cause series");
  }
}

void finish_columns(DesignMatrix& d) {
  std::unordered_set<int> cause_set(d.cause_series.begin(),
                                    d.cause_series.end());
  for (int j = 0; j < int(d.columns.size()); ++j) {
    if (cause_set.count(d.columns[size_t(j)].series))
      d.gc_cols.push_back(j);
    else
      d.rest_cols.push_back(j);
  }
}

}  // namespace

DesignMatrix build_var_design(const TimeSeriesPanel& panel, int target,
                              const std::vector<int>& causes, int p) {
  check_series_args(panel, target, causes);
  if (p < 1) throw std::invalid_argument("design: lag order must be >= 1");
  const long t = panel.rows();
  const long k = panel.cols();
  if (t <= p)
    throw std::invalid_argument("design: need more than p observations");

  DesignMatrix d;
  d.kind = DesignKind::Var;
  d.lag_order = p;
  d.target = target;
  d.cause_series = causes;

  const long rows = t - p;
  d.X.resize(rows, k * p);
  d.y.resize(rows);
  d.columns.resize(size_t(k * p));

  // Series-major, lag-minor: each series' p lags are contiguous.
  for (long s = 0; s < k; ++s)
    for (int lag = 1; lag <= p; ++lag) {
      const long col = s * p + (lag - 1);
      for (long r = 0; r < rows; ++r) d.X(r, col) = panel.data(p + r - lag, s);
      d.columns[size_t(col)] = ColumnInfo{
          int(s), lag, panel.names[size_t(s)] + ".L" + std::to_string(lag)};
    }
  for (long r = 0; r < rows; ++r) d.y(r) = panel.data(p + r, target);

  finish_columns(d);
  return d;
}

DesignMatrix build_var_design(const TimeSeriesPanel& panel, int target,
                              int cause, int p) {
  return build_var_design(panel, target, std::vector<int>{cause}, p);
}

DesignMatrix build_vhar_design(const TimeSeriesPanel& panel, int target,
                               const std::vector<int>& causes) {
  check_series_args(panel, target, causes);
  const long t = panel.rows();
  const long k = panel.cols();
  constexpr int kMonth = 22;
  constexpr int kWeek = 5;
  if (t <= kMonth)
    throw std::invalid_argument("design: VHAR needs more than 22 observations");

  DesignMatrix d;
  d.kind = DesignKind::Vhar;
  d.lag_order = kMonth;
  d.target = target;
  d.cause_series = causes;

  const long rows = t - kMonth;
  d.X.resize(rows, 3 * k);
  d.y.resize(rows);
  d.columns.resize(size_t(3 * k));

  static const char* kTags[3] = {"day", "week", "month"};
  for (long s = 0; s < k; ++s) {
    for (int a = 0; a < 3; ++a)
      d.columns[size_t(s * 3 + a)] =
          ColumnInfo{int(s), a + 1, panel.names[size_t(s)] + "." + kTags[a]};
    for (long r = 0; r < rows; ++r) {
      const long time = kMonth + r;  // row r predicts y at this index
      d.X(r, s * 3 + 0) = panel.data(time - 1, s);
      double week = 0.0;
      for (int l = 1; l <= kWeek; ++l) week += panel.data(time - l, s);
      d.X(r, s * 3 + 1) = week / kWeek;
      double month = 0.0;
      for (int l = 1; l <= kMonth; ++l) month += panel.data(time - l, s);
      d.X(r, s * 3 + 2) = month / kMonth;
    }
  }
  for (long r = 0; r < rows; ++r) d.y(r) = panel.data(kMonth + r, target);

  finish_columns(d);
  return d;
}

DesignMatrix build_vhar_design(const TimeSeriesPanel& panel, int target,
                               int cause) {
  return build_vhar_design(panel, target, std::vector<int>{cause});
}

}  // namespace hdgc
