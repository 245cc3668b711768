#include "hdgc/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "hdgc/csv.hpp"

namespace hdgc {

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string format_sig(double v, int digits) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, digits);
  if (ec != std::errc{}) return "?";
  return std::string(buf, ptr);
}

}  // namespace

nlohmann::json to_json(const TuningAudit& audit) {
  nlohmann::json j;
  j["rule"] = audit.rule;
  j["chosen_lambda"] = audit.chosen_lambda;
  j["chosen_index"] = audit.chosen_index;
  j["grid"] = audit.grid;
  j["criterion"] = audit.criterion;
  j["active_counts"] = audit.active_counts;
  std::vector<int> adm(audit.admissible.begin(), audit.admissible.end());
  j["admissible"] = adm;
  j["bound"] = {{"enforced", audit.bound_enforced}, {"cap", audit.bound_cap}};
  if (!audit.sigma_updates.empty()) j["sigma_updates"] = audit.sigma_updates;
  if (audit.fold_sse.size() > 0) {
    std::vector<std::vector<double>> folds;
    for (long f = 0; f < audit.fold_sse.rows(); ++f) {
      std::vector<double> row(size_t(audit.fold_sse.cols()));
      for (long i = 0; i < audit.fold_sse.cols(); ++i)
        row[size_t(i)] = audit.fold_sse(f, i);
      folds.push_back(std::move(row));
    }
    j["fold_sse"] = folds;
  }
  return j;
}

nlohmann::json to_json(const GCTestResult& result) {
  nlohmann::json j;
  j["target"] = result.target;
  if (result.causes.size() == 1)
    j["cause"] = result.causes.front();
  else
    j["cause"] = result.causes;
  j["statistic"] = finite_or_null(result.statistic);
  j["kind"] = stat_kind_name(result.kind);
  j["dof"] = {{"num", result.dof_num},
              {"den", result.dof_den < 0 ? nlohmann::json(nullptr)
                                         : nlohmann::json(result.dof_den)}};
  j["p_value"] = result.p_value;
  j["S_star"] = result.s_star;
  j["selected"] = result.selected;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& audit : result.audits) steps.push_back(to_json(audit));
  j["tuning"] = {
      {"rule", result.audits.empty() ? "none" : result.audits.front().rule},
      {"steps", steps}};
  j["r_squared"] = result.r_squared;
  j["effective_rows"] = result.effective_rows;
  j["alpha"] = result.alpha;
  j["reject"] = result.reject;
  j["dropped_collinear"] = result.dropped_collinear;
  return j;
}

nlohmann::json network_to_json(const SpilloverNetwork& net,
                               const CommunityPartition* communities) {
  nlohmann::json j;
  j["nodes"] = net.nodes;
  j["alpha"] = net.alpha;
  j["design"] = net.design == DesignKind::Vhar ? "vhar" : "var";
  j["statistic"] = net.statistic;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : net.edges)
    edges.push_back({{"from", net.nodes[size_t(e.from)]},
                     {"to", net.nodes[size_t(e.to)]},
                     {"from_index", e.from},
                     {"to_index", e.to},
                     {"statistic", finite_or_null(e.statistic)},
                     {"p_value", e.p_value}});
  j["edges"] = edges;
  nlohmann::json pmat = nlohmann::json::array();
  for (long r = 0; r < net.p_values.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (long c = 0; c < net.p_values.cols(); ++c)
      row.push_back(finite_or_null(net.p_values(r, c)));
    pmat.push_back(row);
  }
  j["p_values"] = pmat;
  j["failures"] = net.failures;
  if (communities) {
    j["communities"] = {{"assignment", communities->assignment},
                        {"modularity", communities->modularity}};
  }
  return j;
}

std::string network_to_dot(const SpilloverNetwork& net,
                           const CommunityPartition* communities) {
  std::ostringstream out;
  out << "digraph spillover {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=ellipse, style=filled, fillcolor=white];\n";
  int n_comm = 0;
  if (communities)
    for (int c : communities->assignment) n_comm = std::max(n_comm, c + 1);
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    out << "  \"" << net.nodes[i] << "\"";
    if (communities && n_comm > 0) {
      const double hue =
          double(communities->assignment[i]) / double(std::max(1, n_comm));
      out << " [fillcolor=\"" << format_sig(hue, 3) << " 0.35 0.95\"]";
    }
    out << ";\n";
  }
  for (const auto& e : net.edges) {
    out << "  \"" << net.nodes[size_t(e.from)] << "\" -> \""
        << net.nodes[size_t(e.to)] << "\" [label=\"p="
        << format_sig(e.p_value, 3) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string network_edges_csv(const SpilloverNetwork& net) {
  std::ostringstream out;
  out << "from,to,statistic,p_value\n";
  for (const auto& e : net.edges)
    out << net.nodes[size_t(e.from)] << ',' << net.nodes[size_t(e.to)] << ','
        << format_double(e.statistic) << ',' << format_double(e.p_value)
        << '\n';
  return out.str();
}

std::string mc_table_csv(const std::vector<McCell>& cells) {
  std::ostringstream out;
  out << "dgp,hypothesis,rho,T,K,rule,rejection_rate,replications\n";
  for (const auto& c : cells) {
    out << c.dgp << ',' << (c.power ? "power" : "size") << ','
        << format_double(c.rho) << ',' << c.t << ',' << c.k << ',' << c.rule
        << ',';
    if (c.feasible)
      out << format_double(c.rejection_rate);
    else
      out << "NA";
    out << ',' << c.replications << '\n';
  }
  return out.str();
}

nlohmann::json mc_table_json(const std::vector<McCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j;
    j["dgp"] = c.dgp;
    j["hypothesis"] = c.power ? "power" : "size";
    j["rho"] = c.rho;
    j["T"] = c.t;
    j["K"] = c.k;
    j["rule"] = c.rule;
    j["rejection_rate"] = c.feasible ? nlohmann::json(c.rejection_rate)
                                     : nlohmann::json(nullptr);
    j["replications"] = c.replications;
    arr.push_back(j);
  }
  return arr;
}

}  // namespace hdgc
