#pragma once

#include <Eigen/Dense>
#include <string>
#include <tuple>
#include <vector>

#include "hdgc/panel.hpp"
#include "hdgc/pdslm.hpp"

namespace hdgc {

/// Median realized variance of one day of M intraday returns:
///   c * M/(M-2) * sum_{j=2}^{M-1} med(|r_{j-1}|, |r_j|, |r_{j+1}|)^2
/// with c = pi / (6 - 4 sqrt(3) + pi). Requires M >= 3; robust to isolated
/// jumps because a single outlier never is the median of its window.
double medrv(const Eigen::VectorXd& day_returns);

/// Applies medrv per day and series: intraday has days*m rows (m returns per
/// day), output is days x K.
Eigen::MatrixXd medrv_panel(const Eigen::MatrixXd& intraday, int m_per_day);

struct NetworkEdge {
  int from = 0;  ///< cause series
  int to = 0;    ///< target series
  double statistic = 0.0;
  double p_value = 1.0;
};

struct NetworkOptions {
  DesignKind design = DesignKind::Var;
  int lags = 1;
  TuningRule tuning{};
  StatKind statistic = StatKind::LmF;  ///< used when stat_overridden
  bool stat_overridden = false;        ///< else LmF for VAR, LmHet for VHAR
  double alpha = 0.01;
  GcHandling gc_handling = GcHandling::ExcludeThenReinsert;
  bool baseline = false;  ///< bivariate baseline instead of PDS
  int threads = 0;        ///< 0 = hardware concurrency
};

/// All-pairs Granger-causality graph: edge k->i present iff the k->i test
/// rejects at alpha (no multiple-testing correction). Pairs whose test fails
/// (singular / infeasible) are recorded in failures and excluded.
struct SpilloverNetwork {
  std::vector<std::string> nodes;
  std::vector<NetworkEdge> edges;       ///< sorted by (from, to)
  Eigen::MatrixXd p_values;             ///< K x K, NaN on diagonal/failures
  Eigen::MatrixXd statistics;           ///< same layout
  double alpha = 0.01;
  DesignKind design = DesignKind::Var;
  std::string statistic;
  std::vector<std::string> failures;
};

SpilloverNetwork spillover_network(const TimeSeriesPanel& panel,
                                   const NetworkOptions& opts);

/// Simple undirected graph on nodes 0..n-1 with deduplicated edges.
struct UndirectedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  ///< (u, v) with u < v, sorted

  static UndirectedGraph from_edges(int n,
                                    const std::vector<std::pair<int, int>>& e);
  /// Skeleton of a directed network: u-v iff either direction is present.
  static UndirectedGraph skeleton(const SpilloverNetwork& net);
};

/// Brandes edge betweenness with unordered-pair counting: the score of an
/// edge is the number of shortest s-t paths through it, summed over pairs
/// {s, t}, split equally when several shortest paths exist. Aligned with
/// graph.edges.
std::vector<double> edge_betweenness(const UndirectedGraph& graph);

struct CommunityPartition {
  std::vector<int> assignment;  ///< community id per node, ids dense from 0
  double modularity = 0.0;
  /// Edges in removal order with the betweenness at removal time.
  std::vector<std::tuple<int, int, double>> removals;
};

/// Girvan–Newman: repeatedly remove the max-betweenness edge (ties: smallest
/// (u,v)), recomputing betweenness each round; returns the partition along
/// the way with maximal Newman modularity measured on the original graph.
/// An edgeless graph yields singleton communities with modularity 0.
CommunityPartition girvan_newman(const UndirectedGraph& graph);

/// Newman modularity of a partition on this graph; 0 for an edgeless graph.
double modularity(const UndirectedGraph& graph,
                  const std::vector<int>& assignment);

}  // namespace hdgc
