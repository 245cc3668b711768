#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "hdgc/network.hpp"
#include "hdgc/varsim.hpp"

namespace {

// Exhaustive edge betweenness: enumerate every shortest path of every
// unordered pair by depth-first search over the breadth-first-search
// distance levels. Only for tiny graphs.
std::vector<double> brute_betweenness(const hdgc::UndirectedGraph& g) {
  const int n = g.n;
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  std::map<std::pair<int, int>, size_t> eidx;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    const auto [u, v] = g.edges[i];
    adj[size_t(u)].push_back(v);
    adj[size_t(v)].push_back(u);
    eidx[{u, v}] = i;
  }
  const auto edge_of = [&](int a, int b) {
    return eidx.at({std::min(a, b), std::max(a, b)});
  };

  std::vector<double> score(g.edges.size(), 0.0);
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(size_t(n), -1);
    std::queue<int> q;
    dist[size_t(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int u : adj[size_t(v)])
        if (dist[size_t(u)] < 0) {
          dist[size_t(u)] = dist[size_t(v)] + 1;
          q.push(u);
        }
    }
    for (int t = s + 1; t < n; ++t) {
      if (dist[size_t(t)] < 0) continue;
      std::vector<std::vector<size_t>> paths;
      std::vector<size_t> cur;
      std::function<void(int)> walk = [&](int v) {
        if (v == s) {
          paths.push_back(cur);
          return;
        }
        for (int u : adj[size_t(v)])
          if (dist[size_t(u)] == dist[size_t(v)] - 1) {
            cur.push_back(edge_of(u, v));
            walk(u);
            cur.pop_back();
          }
      };
      walk(t);
      const double w = 1.0 / double(paths.size());
      for (const auto& path : paths)
        for (size_t e : path) score[e] += w;
    }
  }
  return score;
}

hdgc::UndirectedGraph random_graph(int n, double p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (u(rng) < p) e.push_back({a, b});
  return hdgc::UndirectedGraph::from_edges(n, e);
}

}  // namespace

TEST_CASE("median realized variance of a constant return stream") {
  const int m = 78;
  const double r = 0.02;
  const Eigen::VectorXd day = Eigen::VectorXd::Constant(m, r);
  const double coef = M_PI / (6.0 - 4.0 * std::sqrt(3.0) + M_PI);
  // Every 3-window median equals |r|, so the sum telescopes to (m-2) r^2 and
  // the m/(m-2) factor cancels it exactly.
  CHECK(hdgc::medrv(day) ==
        doctest::Approx(coef * double(m) * r * r).epsilon(1e-14));
  CHECK(coef == doctest::Approx(1.4193583020224412).epsilon(1e-15));
  CHECK_THROWS_AS(hdgc::medrv(Eigen::VectorXd::Ones(2)),
                  std::invalid_argument);
  Eigen::VectorXd bad = day;
  bad(5) = std::nan("");
  CHECK_THROWS_AS(hdgc::medrv(bad), std::invalid_argument);
}

TEST_CASE("an isolated jump never reaches the median window") {
  const int m = 50;
  Eigen::VectorXd clean = Eigen::VectorXd::Constant(m, 0.01);
  Eigen::VectorXd jumped = clean;
  jumped(25) = 5.0;
  // Realized variance explodes, the median-based estimate does not move at
  // all: the jump is the maximum of every window it enters.
  const double rv_clean = clean.squaredNorm();
  const double rv_jumped = jumped.squaredNorm();
  CHECK(rv_jumped / rv_clean > 1000.0);
  CHECK(hdgc::medrv(jumped) == doctest::Approx(hdgc::medrv(clean))
                                   .epsilon(1e-14));
}

TEST_CASE("median realized variance is unbiased for constant volatility") {
  const int m = 39;
  const int days = 2000;
  const double s = 0.01;
  hdgc::NormalSampler sampler(777);
  Eigen::MatrixXd intraday(days * m, 2);
  for (long r = 0; r < intraday.rows(); ++r) {
    intraday(r, 0) = s * sampler();
    intraday(r, 1) = 2.0 * s * sampler();
  }
  const Eigen::MatrixXd daily = hdgc::medrv_panel(intraday, m);
  REQUIRE(daily.rows() == days);
  REQUIRE(daily.cols() == 2);
  // The scaling constant makes the per-day expectation equal the integrated
  // variance m * s^2 for independent draws.
  CHECK(daily.col(0).mean() ==
        doctest::Approx(double(m) * s * s).epsilon(0.03));
  CHECK(daily.col(1).mean() ==
        doctest::Approx(4.0 * double(m) * s * s).epsilon(0.03));
  // Row 0 equals a direct evaluation on the first day's slice.
  CHECK(daily(0, 1) ==
        doctest::Approx(hdgc::medrv(intraday.col(1).head(m))).epsilon(1e-14));

  CHECK_THROWS_AS(hdgc::medrv_panel(intraday.topRows(m + 1), m),
                  std::invalid_argument);
  CHECK_THROWS_AS(hdgc::medrv_panel(intraday, 2), std::invalid_argument);
}

TEST_CASE("graph construction deduplicates and validates edges") {
  const auto g = hdgc::UndirectedGraph::from_edges(
      4, {{1, 0}, {0, 1}, {2, 1}, {3, 3}, {2, 3}});
  CHECK(g.n == 4);
  CHECK(g.edges == std::vector<std::pair<int, int>>(
                       {{0, 1}, {1, 2}, {2, 3}}));  // loops dropped, sorted
  CHECK_THROWS_AS(hdgc::UndirectedGraph::from_edges(3, {{0, 5}}),
                  std::invalid_argument);
}

TEST_CASE("edge betweenness of a path graph") {
  const auto g =
      hdgc::UndirectedGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto b = hdgc::edge_betweenness(g);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(b[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("edge betweenness matches exhaustive path enumeration") {
  int case_id = 0;
  for (int n : {5, 8, 10, 12}) {
    for (double p : {0.25, 0.45}) {
      const auto g = random_graph(n, p, 1000u + unsigned(case_id++));
      const auto fast = hdgc::edge_betweenness(g);
      const auto slow = brute_betweenness(g);
      REQUIRE(fast.size() == slow.size());
      for (size_t i = 0; i < fast.size(); ++i)
        CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-9));
      // Total betweenness equals the sum of pairwise distances: each
      // reachable pair spreads exactly dist units of weight over its paths.
      double total = 0.0, dist_sum = 0.0;
      for (double v : fast) total += v;
      for (double v : slow) dist_sum += v;  // same identity holds for both
      CHECK(total == doctest::Approx(dist_sum).epsilon(1e-9));
    }
  }
}

TEST_CASE("two cliques joined by one bridge split at the bridge") {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) {
      e.push_back({a, b});
      e.push_back({a + 5, b + 5});
    }
  e.push_back({4, 5});
  const auto g = hdgc::UndirectedGraph::from_edges(10, e);
  REQUIRE(g.edges.size() == 21);

  // Every one of the 25 cross pairs routes its unique shortest path over the
  // bridge, so the first removal must be the bridge at weight 25.
  const auto part = hdgc::girvan_newman(g);
  REQUIRE(!part.removals.empty());
  CHECK(std::get<0>(part.removals[0]) == 4);
  CHECK(std::get<1>(part.removals[0]) == 5);
  CHECK(std::get<2>(part.removals[0]) == doctest::Approx(25.0).epsilon(1e-12));

  for (int a = 1; a < 5; ++a)
    CHECK(part.assignment[size_t(a)] == part.assignment[0]);
  for (int b = 6; b < 10; ++b)
    CHECK(part.assignment[size_t(b)] == part.assignment[5]);
  CHECK(part.assignment[0] != part.assignment[5]);
  CHECK(part.modularity ==
        doctest::Approx(20.0 / 21.0 - 0.5).epsilon(1e-12));
  CHECK(hdgc::modularity(g, part.assignment) ==
        doctest::Approx(part.modularity).epsilon(1e-12));
}

TEST_CASE("community recovery agrees with an exhaustive partition search") {
  // A ring of four triangles: the optimum over all 4,213,597 partitions of
  // 12 nodes is the four-triangle split, which the edge-removal process must
  // also find.
  std::vector<std::pair<int, int>> e;
  for (int t = 0; t < 4; ++t) {
    const int base = 3 * t;
    e.push_back({base, base + 1});
    e.push_back({base, base + 2});
    e.push_back({base + 1, base + 2});
  }
  e.push_back({2, 3});
  e.push_back({5, 6});
  e.push_back({8, 9});
  e.push_back({11, 0});
  const auto g = hdgc::UndirectedGraph::from_edges(12, e);
  REQUIRE(g.edges.size() == 16);

  const int n = 12;
  std::vector<int> deg(size_t(n), 0);
  for (auto [u, v] : g.edges) {
    ++deg[size_t(u)];
    ++deg[size_t(v)];
  }
  const double m_edges = double(g.edges.size());
  std::vector<int> a(size_t(n), 0);
  double best_q = -1.0;
  std::vector<int> best;
  std::vector<double> within(size_t(n), 0.0), degsum(size_t(n), 0.0);
  const auto eval = [&]() {
    std::fill(within.begin(), within.end(), 0.0);
    std::fill(degsum.begin(), degsum.end(), 0.0);
    for (auto [u, v] : g.edges)
      if (a[size_t(u)] == a[size_t(v)]) within[size_t(a[size_t(u)])] += 1.0;
    for (int i = 0; i < n; ++i) degsum[size_t(a[size_t(i)])] += double(deg[size_t(i)]);
    double q = 0.0;
    for (int c = 0; c < n; ++c) {
      const double frac = degsum[size_t(c)] / (2.0 * m_edges);
      q += within[size_t(c)] / m_edges - frac * frac;
    }
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  };
  // Restricted growth strings enumerate each set partition exactly once.
  std::function<void(int, int)> rec = [&](int i, int mx) {
    if (i == n) {
      eval();
      return;
    }
    for (int c = 0; c <= mx; ++c) {
      a[size_t(i)] = c;
      rec(i + 1, std::max(mx, c + 1));
    }
  };
  rec(1, 1);

  CHECK(best_q == doctest::Approx(0.5).epsilon(1e-12));
  const auto part = hdgc::girvan_newman(g);
  CHECK(part.modularity == doctest::Approx(best_q).epsilon(1e-12));
  CHECK(hdgc::modularity(g, part.assignment) ==
        doctest::Approx(part.modularity).epsilon(1e-12));
  for (int t = 0; t < 4; ++t) {
    const int base = 3 * t;
    CHECK(part.assignment[size_t(base + 1)] == part.assignment[size_t(base)]);
    CHECK(part.assignment[size_t(base + 2)] == part.assignment[size_t(base)]);
  }
  CHECK(part.assignment[0] != part.assignment[3]);
  CHECK(part.assignment[3] != part.assignment[6]);
  CHECK(part.assignment[6] != part.assignment[9]);
  CHECK(part.assignment[9] != part.assignment[0]);
}

TEST_CASE("modularity of a pentagon partition and degenerate graphs") {
  const auto g = hdgc::UndirectedGraph::from_edges(
      5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  CHECK(hdgc::modularity(g, {0, 0, 0, 1, 1}) ==
        doctest::Approx(0.08).epsilon(1e-12));
  CHECK(hdgc::modularity(g, {0, 0, 0, 0, 0}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const auto empty = hdgc::UndirectedGraph::from_edges(4, {});
  CHECK(hdgc::modularity(empty, {0, 1, 2, 3}) == 0.0);
  const auto part = hdgc::girvan_newman(empty);
  CHECK(part.removals.empty());
  CHECK(part.modularity == 0.0);
  std::vector<int> ids = part.assignment;
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<int>({0, 1, 2, 3}));
}

TEST_CASE("the all-pairs network finds a planted link") {
  hdgc::VarCoefficients coeffs;
  Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(4, 4);
  a0.diagonal() << 0.5, 0.45, 0.4, 0.35;
  a0(0, 3) = 0.4;  // series 4 drives series 1
  coeffs.lags = {a0};
  const auto panel = hdgc::simulate_var(coeffs, hdgc::toeplitz_sigma(4, 0.0),
                                        400, hdgc::kDefaultBurnIn, 99);

  hdgc::NetworkOptions opts;
  opts.lags = 1;
  opts.tuning = hdgc::TuningRule::bic();
  opts.alpha = 0.01;
  opts.threads = 1;
  const auto net = hdgc::spillover_network(panel, opts);

  CHECK(net.nodes == panel.names);
  CHECK(net.statistic == "lmf");
  CHECK(net.failures.empty());
  for (int i = 0; i < 4; ++i) CHECK(std::isnan(net.p_values(i, i)));
  CHECK(net.p_values(3, 0) < 0.01);

  bool found = false;
  for (const auto& edge : net.edges) {
    if (edge.from == 3 && edge.to == 0) found = true;
    CHECK(edge.p_value < opts.alpha);
    CHECK(edge.p_value == net.p_values(edge.from, edge.to));
    CHECK(edge.statistic == net.statistics(edge.from, edge.to));
  }
  CHECK(found);
  for (size_t i = 1; i < net.edges.size(); ++i) {
    const auto& a_e = net.edges[i - 1];
    const auto& b_e = net.edges[i];
    CHECK((a_e.from < b_e.from ||
           (a_e.from == b_e.from && a_e.to < b_e.to)));
  }

  const auto skel = hdgc::UndirectedGraph::skeleton(net);
  bool has_03 = false;
  for (auto [u, v] : skel.edges)
    if (u == 0 && v == 3) has_03 = true;
  CHECK(has_03);

  // The bivariate baseline labels itself accordingly.
  opts.baseline = true;
  const auto base = hdgc::spillover_network(panel, opts);
  CHECK(base.statistic == "bivariate-f");
  CHECK(base.p_values(3, 0) < 0.01);

  hdgc::TimeSeriesPanel tiny;
  tiny.data = panel.data.leftCols(1);
  tiny.names = {panel.names[0]};
  CHECK_THROWS_AS(hdgc::spillover_network(tiny, opts), std::invalid_argument);
}
