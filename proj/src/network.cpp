#include "hdgc/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

namespace hdgc {

double medrv(const Eigen::VectorXd& day_returns) {
  const long m = day_returns.size();
  if (m < 3) throw std::invalid_argument("medrv: need at least 3 returns");
  if (!day_returns.allFinite())
    throw std::invalid_argument("medrv: non-finite return");
  const double coef = M_PI / (6.0 - 4.0 * std::sqrt(3.0) + M_PI);
  double sum = 0.0;
  for (long j = 1; j + 1 < m; ++j) {
    const double a = std::abs(day_returns(j - 1));
    const double b = std::abs(day_returns(j));
    const double c = std::abs(day_returns(j + 1));
    const double med = std::max(std::min(a, b), std::min(std::max(a, b), c));
    sum += med * med;
  }
  return coef * (double(m) / double(m - 2)) * sum;
}

Eigen::MatrixXd medrv_panel(const Eigen::MatrixXd& intraday, int m_per_day) {
  if (m_per_day < 3)
    throw std::invalid_argument("medrv: need at least 3 returns per day");
  const long rows = intraday.rows();
  if (rows == 0 || rows % m_per_day != 0)
    throw std::invalid_argument(
        "medrv: row count is not a multiple of returns-per-day");
  const long days = rows / m_per_day;
  Eigen::MatrixXd out(days, intraday.cols());
  for (long d = 0; d < days; ++d)
    for (long s = 0; s < intraday.cols(); ++s)
      out(d, s) = medrv(intraday.col(s).segment(d * m_per_day, m_per_day));
  return out;
}

SpilloverNetwork spillover_network(const TimeSeriesPanel& panel,
                                   const NetworkOptions& opts) {
  panel.validate();
  const long k = panel.cols();
  if (k < 2)
    throw std::invalid_argument("network: need at least 2 series");
  // Fail fast on a panel that cannot support the design at all.
  if (opts.design == DesignKind::Vhar) {
    build_vhar_design(panel, 0, 1);
  } else {
    build_var_design(panel, 0, 1, opts.lags);
  }

  const StatKind stat =
      opts.stat_overridden
          ? opts.statistic
          : (opts.design == DesignKind::Vhar ? StatKind::LmHet : StatKind::LmF);

  SpilloverNetwork net;
  net.nodes = panel.names;
  net.alpha = opts.alpha;
  net.design = opts.design;
  net.statistic = opts.baseline
                      ? (opts.design == DesignKind::Vhar ? "bivariate-het"
                                                         : "bivariate-f")
                      : stat_kind_name(stat);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  net.p_values = Eigen::MatrixXd::Constant(k, k, nan);
  net.statistics = Eigen::MatrixXd::Constant(k, k, nan);

  struct Pair {
    int cause;
    int target;
  };
  std::vector<Pair> pairs;
  for (int c = 0; c < k; ++c)
    for (int t = 0; t < k; ++t)
      if (c != t) pairs.push_back({c, t});

  struct Outcome {
    bool ok = false;
    double stat = 0.0;
    double p = 1.0;
    std::string error;
  };
  std::vector<Outcome> outcomes(pairs.size());

  const auto run_pair = [&](size_t idx) {
    const auto [cause, target] = pairs[idx];
    Outcome& out = outcomes[idx];
    try {
      GCTestResult r;
      if (opts.baseline) {
        if (opts.design == DesignKind::Vhar) {
          TimeSeriesPanel sub;
          sub.data.resize(panel.rows(), 2);
          sub.data.col(0) = panel.data.col(target);
          sub.data.col(1) = panel.data.col(cause);
          sub.names = {panel.names[size_t(target)] ,
                       panel.names[size_t(cause)]};
          GCTestSpec spec;
          spec.target = 0;
          spec.causes = {1};
          spec.vhar = true;
          spec.statistic = StatKind::LmHet;
          spec.tuning = TuningRule::fixed(0.0);
          spec.alpha = opts.alpha;
          r = pds_lm_het_robust(sub, spec);
        } else {
          GCTestSpec spec;
          spec.target = target;
          spec.causes = {cause};
          spec.lags = opts.lags;
          spec.statistic = StatKind::BivariateF;
          spec.alpha = opts.alpha;
          r = run_gc_test(panel, spec);
        }
      } else {
        GCTestSpec spec;
        spec.target = target;
        spec.causes = {cause};
        spec.lags = opts.lags;
        spec.vhar = opts.design == DesignKind::Vhar;
        spec.tuning = opts.tuning;
        spec.statistic = stat;
        spec.alpha = opts.alpha;
        spec.gc_handling = opts.gc_handling;
        r = run_gc_test(panel, spec);
      }
      out.ok = true;
      out.stat = r.statistic;
      out.p = r.p_value;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  unsigned workers = opts.threads > 0
                         ? unsigned(opts.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, unsigned(pairs.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < pairs.size(); ++i) run_pair(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < pairs.size();
             i = next.fetch_add(1))
          run_pair(i);
      });
    for (auto& th : pool) th.join();
  }

  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto [cause, target] = pairs[i];
    const Outcome& out = outcomes[i];
    if (!out.ok) {
      net.failures.push_back(panel.names[size_t(cause)] + "->" +
                             panel.names[size_t(target)] + ": " + out.error);
      continue;
    }
    net.p_values(cause, target) = out.p;
    net.statistics(cause, target) = out.stat;
    if (out.p < opts.alpha)
      net.edges.push_back(NetworkEdge{cause, target, out.stat, out.p});
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const NetworkEdge& a, const NetworkEdge& b) {
              return a.from != b.from ? a.from < b.from : a.to < b.to;
            });
  std::sort(net.failures.begin(), net.failures.end());
  return net;
}

UndirectedGraph UndirectedGraph::from_edges(
    int n, const std::vector<std::pair<int, int>>& e) {
  UndirectedGraph g;
  g.n = n;
  std::set<std::pair<int, int>> dedup;
  for (auto [u, v] : e) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("graph: node index out of range");
    if (u == v) continue;
    dedup.insert({std::min(u, v), std::max(u, v)});
  }
  g.edges.assign(dedup.begin(), dedup.end());
  return g;
}

UndirectedGraph UndirectedGraph::skeleton(const SpilloverNetwork& net) {
  std::vector<std::pair<int, int>> e;
  e.reserve(net.edges.size());
  for (const auto& edge : net.edges) e.push_back({edge.from, edge.to});
  return from_edges(int(net.nodes.size()), e);
}

std::vector<double> edge_betweenness(const UndirectedGraph& graph) {
  const int n = graph.n;
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(n));
  for (int e = 0; e < int(graph.edges.size()); ++e) {
    const auto [u, v] = graph.edges[size_t(e)];
    adj[size_t(u)].push_back({v, e});
    adj[size_t(v)].push_back({u, e});
  }

  std::vector<double> score(graph.edges.size(), 0.0);
  std::vector<int> dist(static_cast<size_t>(n), 0), order;
  std::vector<double> sigma(static_cast<size_t>(n), 0.0), delta(static_cast<size_t>(n), 0.0);
  std::vector<std::vector<std::pair<int, int>>> pred(static_cast<size_t>(n));

  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : pred) p.clear();
    order.clear();

    std::deque<int> queue{s};
    dist[size_t(s)] = 0;
    sigma[size_t(s)] = 1.0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (auto [w, e] : adj[size_t(v)]) {
        if (dist[size_t(w)] < 0) {
          dist[size_t(w)] = dist[size_t(v)] + 1;
          queue.push_back(w);
        }
        if (dist[size_t(w)] == dist[size_t(v)] + 1) {
          sigma[size_t(w)] += sigma[size_t(v)];
          pred[size_t(w)].push_back({v, e});
        }
      }
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      for (auto [v, e] : pred[size_t(w)]) {
        const double c =
            sigma[size_t(v)] / sigma[size_t(w)] * (1.0 + delta[size_t(w)]);
        score[size_t(e)] += c;
        delta[size_t(v)] += c;
      }
    }
  }
  // Each unordered pair {s, t} was counted from both endpoints.
  for (double& v : score) v /= 2.0;
  return score;
}

namespace {

std::vector<int> components(int n,
                            const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (auto [u, v] : edges) {
    adj[size_t(u)].push_back(v);
    adj[size_t(v)].push_back(u);
  }
  std::vector<int> comp(size_t(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[size_t(s)] >= 0) continue;
    comp[size_t(s)] = next;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : adj[size_t(v)])
        if (comp[size_t(w)] < 0) {
          comp[size_t(w)] = next;
          queue.push_back(w);
        }
    }
    ++next;
  }
  return comp;
}

}  // namespace

double modularity(const UndirectedGraph& graph,
                  const std::vector<int>& assignment) {
  if (int(assignment.size()) != graph.n)
    throw std::invalid_argument("modularity: assignment size mismatch");
  const double m = double(graph.edges.size());
  if (m == 0) return 0.0;
  std::map<int, double> within, degree;
  for (auto [u, v] : graph.edges) {
    if (assignment[size_t(u)] == assignment[size_t(v)])
      within[assignment[size_t(u)]] += 1.0;
    degree[assignment[size_t(u)]] += 1.0;
    degree[assignment[size_t(v)]] += 1.0;
  }
  double q = 0.0;
  for (auto& [c, d] : degree) {
    const double mc = within.count(c) ? within[c] : 0.0;
    q += mc / m - (d / (2.0 * m)) * (d / (2.0 * m));
  }
  return q;
}

CommunityPartition girvan_newman(const UndirectedGraph& graph) {
  CommunityPartition best;
  best.assignment = components(graph.n, graph.edges);
  best.modularity = modularity(graph, best.assignment);

  UndirectedGraph work = graph;
  CommunityPartition result = best;
  while (!work.edges.empty()) {
    const auto scores = edge_betweenness(work);
    size_t pick = 0;
    for (size_t e = 1; e < scores.size(); ++e)
      if (scores[e] > scores[pick]) pick = e;  // ties keep the smallest (u,v)
    const auto edge = work.edges[pick];
    result.removals.push_back({edge.first, edge.second, scores[pick]});
    work.edges.erase(work.edges.begin() + long(pick));

    const auto assignment = components(graph.n, work.edges);
    const double q = modularity(graph, assignment);
    if (q > result.modularity) {
      result.assignment = assignment;
      result.modularity = q;
    }
  }
  return result;
}

}  // namespace hdgc
