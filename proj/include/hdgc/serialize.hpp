#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hdgc/montecarlo.hpp"
#include "hdgc/network.hpp"
#include "hdgc/pdslm.hpp"

namespace hdgc {

/// {target, cause, statistic, kind, dof, p_value, S_star, selected,
///  tuning:{rule, steps:[...]}} plus a few diagnostic fields.
nlohmann::json to_json(const GCTestResult& result);

nlohmann::json to_json(const TuningAudit& audit);

nlohmann::json network_to_json(const SpilloverNetwork& net,
                               const CommunityPartition* communities = nullptr);

/// Graphviz DOT with directed edges labelled by p-value; communities (when
/// given) become fill colors.
std::string network_to_dot(const SpilloverNetwork& net,
                           const CommunityPartition* communities = nullptr);

/// "from,to,statistic,p_value" rows.
std::string network_edges_csv(const SpilloverNetwork& net);

/// Long-format CSV: dgp,hypothesis,rho,T,K,rule,rejection_rate,replications.
/// Infeasible cells print NA.
std::string mc_table_csv(const std::vector<McCell>& cells);

nlohmann::json mc_table_json(const std::vector<McCell>& cells);

}  // namespace hdgc
