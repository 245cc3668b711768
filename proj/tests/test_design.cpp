#include <doctest.h>

#include <Eigen/Dense>

#include "hdgc/design.hpp"

namespace {

hdgc::TimeSeriesPanel counting_panel(long t, int k) {
  // data(r, s) = 100*s + r makes every cell's provenance readable.
  hdgc::TimeSeriesPanel p;
  p.data.resize(t, k);
  for (long r = 0; r < t; ++r)
    for (int s = 0; s < k; ++s) p.data(r, s) = 100.0 * s + double(r);
  p.names = hdgc::default_series_names(k);
  return p;
}

}  // namespace

TEST_CASE("lagged design layout and provenance") {
  const auto panel = counting_panel(5, 2);
  const auto d = hdgc::build_var_design(panel, 1, 0, 2);

  CHECK(d.effective_rows() == 3);
  CHECK(d.n_cols() == 4);
  CHECK(d.lag_order == 2);
  CHECK(d.target == 1);

  // Response: target series at times 2..4.
  CHECK(d.y(0) == 102.0);
  CHECK(d.y(2) == 104.0);

  // Columns are series-major, lag-minor: s1.L1, s1.L2, s2.L1, s2.L2.
  REQUIRE(d.columns.size() == 4);
  CHECK(d.columns[0].label == "s1.L1");
  CHECK(d.columns[1].label == "s1.L2");
  CHECK(d.columns[2].label == "s2.L1");
  CHECK(d.columns[3].label == "s2.L2");
  CHECK(d.columns[3].series == 1);
  CHECK(d.columns[3].lag == 2);

  // Row r of X pairs y at time 2+r with lags 1 and 2.
  CHECK(d.X(0, 0) == 1.0);    // s1 at time 1
  CHECK(d.X(0, 1) == 0.0);    // s1 at time 0
  CHECK(d.X(0, 2) == 101.0);  // s2 at time 1
  CHECK(d.X(0, 3) == 100.0);  // s2 at time 0
  CHECK(d.X(2, 0) == 3.0);
  CHECK(d.X(2, 3) == 102.0);

  // Cause series 0 owns the first block.
  CHECK(d.gc_cols == std::vector<int>{0, 1});
  CHECK(d.rest_cols == std::vector<int>{2, 3});
}

TEST_CASE("multi-cause designs mark every cause block") {
  const auto panel = counting_panel(8, 4);
  const auto d = hdgc::build_var_design(panel, 1, std::vector<int>{0, 2}, 1);
  CHECK(d.n_cols() == 4);
  CHECK(d.gc_cols == std::vector<int>{0, 2});
  CHECK(d.rest_cols == std::vector<int>{1, 3});
  CHECK(d.cause_series == std::vector<int>{0, 2});
}

TEST_CASE("design rows never use future observations") {
  const auto panel = counting_panel(10, 3);
  auto bumped = panel;
  bumped.data(9, 0) += 1000.0;  // perturb only the final time point
  const auto a = hdgc::build_var_design(panel, 1, 0, 2);
  const auto b = hdgc::build_var_design(bumped, 1, 0, 2);
  // The final observation can only ever appear in the response.
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);

  auto bumped_t = panel;
  bumped_t.data(9, 1) += 1000.0;
  const auto c = hdgc::build_var_design(bumped_t, 1, 0, 2);
  CHECK(a.X == c.X);
  CHECK(c.y(c.y.size() - 1) == a.y(a.y.size() - 1) + 1000.0);
}

TEST_CASE("design input validation") {
  const auto panel = counting_panel(6, 3);
  CHECK_THROWS_AS(hdgc::build_var_design(panel, 0, 0, 1),
                  std::invalid_argument);  // target == cause
  CHECK_THROWS_AS(hdgc::build_var_design(panel, 3, 0, 1),
                  std::invalid_argument);  // target out of range
  CHECK_THROWS_AS(hdgc::build_var_design(panel, 1, 0, 0),
                  std::invalid_argument);  // p < 1
  CHECK_THROWS_AS(hdgc::build_var_design(panel, 1, 0, 6),
                  std::invalid_argument);  // T <= p
  CHECK_THROWS_AS(
      hdgc::build_var_design(panel, 1, std::vector<int>{0, 0}, 1),
      std::invalid_argument);  // duplicate causes
}

TEST_CASE("heterogeneous design averages daily weekly monthly windows") {
  const long t = 30;
  const auto panel = counting_panel(t, 2);
  const auto d = hdgc::build_vhar_design(panel, 0, 1);

  CHECK(d.effective_rows() == t - 22);
  CHECK(d.n_cols() == 6);
  CHECK(d.lag_order == 22);
  REQUIRE(d.columns.size() == 6);
  CHECK(d.columns[0].label == "s1.day");
  CHECK(d.columns[1].label == "s1.week");
  CHECK(d.columns[2].label == "s1.month");
  CHECK(d.columns[3].label == "s2.day");

  // Row r targets time 22+r. With data(r, s) = 100 s + r the windows have
  // exact means: daily = v-1, weekly = v-3, monthly = v-11.5 where v = 22+r.
  for (long r = 0; r < d.effective_rows(); ++r) {
    const double v = double(22 + r);
    CHECK(d.y(r) == v);
    CHECK(d.X(r, 0) == v - 1.0);
    CHECK(d.X(r, 1) == doctest::Approx(v - 3.0));
    CHECK(d.X(r, 2) == doctest::Approx(v - 11.5));
    CHECK(d.X(r, 3) == 100.0 + v - 1.0);
    CHECK(d.X(r, 4) == doctest::Approx(100.0 + v - 3.0));
    CHECK(d.X(r, 5) == doctest::Approx(100.0 + v - 11.5));
  }

  CHECK(d.gc_cols == std::vector<int>{3, 4, 5});
  CHECK(d.rest_cols == std::vector<int>{0, 1, 2});

  CHECK_THROWS_AS(hdgc::build_vhar_design(counting_panel(22, 2), 0, 1),
                  std::invalid_argument);
}
