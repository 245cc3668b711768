// hdgc: high-dimensional Granger causality toolkit.
//
// Subcommands: simulate | test | network | montecarlo | medrv.
// Every subcommand accepts --config FILE with a JSON object; nested keys
// address subcommands ({"test": {"lags": 2}}) and command-line flags always
// win over config values.

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hdgc/csv.hpp"
#include "hdgc/montecarlo.hpp"
#include "hdgc/network.hpp"
#include "hdgc/pdslm.hpp"
#include "hdgc/serialize.hpp"
#include "hdgc/varsim.hpp"

namespace {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json root;
    try {
      input >> root;
    } catch (const std::exception& e) {
      throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    if (!root.is_object())
      throw CLI::ConfigError("config root must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(root, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const nlohmann::json& obj,
                      const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const nlohmann::json& v = it.value();
      if (v.is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        flatten(v, nested, items);
      } else {
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = it.key();
        if (v.is_array())
          for (const auto& el : v) item.inputs.push_back(scalar(el));
        else
          item.inputs.push_back(scalar(v));
        items.push_back(std::move(item));
      }
    }
  }
};

struct TuneFlags {
  std::string tune = "bic";
  double ebic_gamma = 0.5;
  double plugin_alpha = 0.05;
  double plugin_c = 0.5;
  int plugin_updates = 15;
  int folds = 5;
  double min_train_fraction = 0.5;
  double fixed_lambda = 0.0;
  bool no_bound = false;
  double bound_fraction = 0.5;
  int n_lambda = 100;
  double grid_ratio = 0.0;
  bool adaptive = false;
};

void add_tuning_flags(CLI::App* cmd, TuneFlags& f, bool single_rule = true) {
  if (single_rule)
    cmd->add_option("--tune", f.tune,
                    "Penalty selection rule: aic|bic|ebic|plugin|tscv|fixed")
        ->capture_default_str();
  cmd->add_option("--ebic-gamma", f.ebic_gamma, "EBIC gamma")
      ->capture_default_str();
  cmd->add_option("--plugin-alpha", f.plugin_alpha,
                  "Plug-in rule significance level")
      ->capture_default_str();
  cmd->add_option("--plugin-c", f.plugin_c, "Plug-in rule constant c")
      ->capture_default_str();
  cmd->add_option("--plugin-updates", f.plugin_updates,
                  "Max plug-in sigma updates")
      ->capture_default_str();
  cmd->add_option("--folds", f.folds, "Cross-validation folds")
      ->capture_default_str();
  cmd->add_option("--min-train-fraction", f.min_train_fraction,
                  "Smallest training fraction for cross-validation")
      ->capture_default_str();
  cmd->add_option("--lambda", f.fixed_lambda,
                  "Penalty level for --tune fixed");
  cmd->add_flag("--no-bound", f.no_bound,
                "Disable the penalty lower bound on selected-set size");
  cmd->add_option("--bound-fraction", f.bound_fraction,
                  "Penalty lower bound cap as a fraction of the sample")
      ->capture_default_str();
  cmd->add_option("--n-lambda", f.n_lambda, "Grid size")
      ->capture_default_str();
  cmd->add_option("--grid-ratio", f.grid_ratio,
                  "Smallest grid lambda as a fraction of lambda_max "
                  "(0 = automatic)");
  cmd->add_flag("--adaptive", f.adaptive,
                "Adaptive-lasso reweighting from a pilot fit");
}

hdgc::TuningRule make_rule(const TuneFlags& f, const std::string& name) {
  hdgc::TuningRule rule;
  rule.kind = hdgc::tune_kind_from_name(name);
  rule.ebic_gamma = f.ebic_gamma;
  rule.plugin_alpha = f.plugin_alpha;
  rule.plugin_c = f.plugin_c;
  rule.plugin_max_updates = f.plugin_updates;
  rule.tscv_folds = f.folds;
  rule.tscv_min_train_fraction = f.min_train_fraction;
  rule.fixed_lambda = f.fixed_lambda;
  rule.enforce_bound = !f.no_bound;
  rule.lower_bound_fraction = f.bound_fraction;
  rule.n_lambda = f.n_lambda;
  rule.grid_ratio = f.grid_ratio;
  rule.adaptive = f.adaptive;
  rule.adaptive_gamma = 1.0;
  return rule;
}

hdgc::GcHandling parse_gc_handling(const std::string& name) {
  if (name == "exclude") return hdgc::GcHandling::ExcludeThenReinsert;
  if (name == "keep-unpenalized") return hdgc::GcHandling::KeepUnpenalized;
  if (name == "keep-penalized") return hdgc::GcHandling::KeepPenalized;
  throw CLI::ValidationError("--gc-handling",
                             "must be exclude|keep-unpenalized|keep-penalized");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

long require_series(const hdgc::TimeSeriesPanel& panel,
                    const std::string& name) {
  const long idx = panel.series_index(name);
  if (idx >= 0) return idx;
  // Fall back to a 0-based column index when the token is numeric.
  long parsed = -1;
  const auto [ptr, ec] =
      std::from_chars(name.data(), name.data() + name.size(), parsed);
  if (ec == std::errc{} && ptr == name.data() + name.size() && parsed >= 0 &&
      parsed < panel.cols())
    return parsed;
  throw std::runtime_error("series '" + name + "' not found in the data");
}

int run_simulate(int dgp, int k, long t, double rho,
                 const std::string& hypothesis, std::uint64_t seed,
                 int burn_in, const std::string& out) {
  const auto hyp = hypothesis == "alternative" ? hdgc::Hypothesis::Alternative
                                               : hdgc::Hypothesis::Null;
  if (hypothesis != "null" && hypothesis != "alternative")
    throw std::runtime_error("--hypothesis must be null|alternative");
  const auto coeffs = hdgc::build_dgp(dgp, k, hyp);
  const auto sigma = hdgc::toeplitz_sigma(k, rho);
  const auto panel = hdgc::simulate_var(coeffs, sigma, t, burn_in, seed);
  hdgc::write_panel_csv(panel, out);
  std::cout << "wrote " << panel.rows() << " x " << panel.cols() << " panel to "
            << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional Granger causality testing"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON configuration file");

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Simulate a VAR panel");
  sim->fallthrough();
  int sim_dgp = 1, sim_k = 10, sim_burn = hdgc::kDefaultBurnIn;
  long sim_t = 200;
  double sim_rho = 0.0;
  std::string sim_hyp = "null", sim_out;
  std::uint64_t sim_seed = 1;
  sim->add_option("--dgp", sim_dgp, "Design 1, 2 or 3")->capture_default_str();
  sim->add_option("--k", sim_k, "Number of series")->capture_default_str();
  sim->add_option("--t", sim_t, "Observations to keep")->capture_default_str();
  sim->add_option("--rho", sim_rho, "Innovation Toeplitz correlation")
      ->capture_default_str();
  sim->add_option("--hypothesis", sim_hyp, "null|alternative")
      ->capture_default_str();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_option("--burn-in", sim_burn, "Discarded initial steps")
      ->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV path")->required();

  // --- test -------------------------------------------------------------
  auto* test = app.add_subcommand("test", "Granger-causality test");
  test->fallthrough();
  std::string test_data, test_target, test_stat = "lmf", test_out;
  std::vector<std::string> test_causes;
  std::string test_handling = "exclude";
  int test_lags = 1;
  bool test_vhar = false;
  double test_alpha = 0.05;
  TuneFlags test_tf;
  test->add_option("--data", test_data, "Input panel CSV")->required();
  test->add_option("--target", test_target, "Target series name")->required();
  test->add_option("--cause", test_causes,
                   "Cause series name(s), comma separated")
      ->required()
      ->delimiter(',');
  test->add_option("--lags", test_lags, "VAR order")->capture_default_str();
  test->add_flag("--vhar", test_vhar, "Use the heterogeneous (VHAR) design");
  test->add_option("--stat", test_stat,
                   "Statistic: lmf|lmchi2|wald|waldf|het|bivf")
      ->capture_default_str();
  test->add_option("--alpha", test_alpha, "Significance level")
      ->capture_default_str();
  test->add_option("--gc-handling", test_handling,
                   "exclude|keep-unpenalized|keep-penalized")
      ->capture_default_str();
  test->add_option("--out", test_out, "Also write the JSON result here");
  add_tuning_flags(test, test_tf);

  // --- network ----------------------------------------------------------
  auto* net = app.add_subcommand("network", "All-pairs spillover network");
  net->fallthrough();
  std::string net_data, net_design = "var", net_stat, net_prefix;
  std::string net_handling = "exclude";
  int net_lags = 1, net_threads = 0;
  double net_alpha = 0.01;
  bool net_baseline = false;
  TuneFlags net_tf;
  net->add_option("--data", net_data, "Input panel CSV")->required();
  net->add_option("--design", net_design, "var|vhar")->capture_default_str();
  net->add_option("--lags", net_lags, "VAR order")->capture_default_str();
  net->add_option("--stat", net_stat,
                  "Statistic override (default: lmf for var, het for vhar)");
  net->add_option("--alpha", net_alpha, "Edge significance level")
      ->capture_default_str();
  net->add_option("--gc-handling", net_handling,
                  "exclude|keep-unpenalized|keep-penalized")
      ->capture_default_str();
  net->add_flag("--baseline", net_baseline,
                "Also run the bivariate baseline and write a second graph");
  net->add_option("--threads", net_threads, "Worker threads (0 = auto)")
      ->capture_default_str();
  net->add_option("--out-prefix", net_prefix,
                  "Prefix for .json/.dot/_edges.csv outputs")
      ->required();
  add_tuning_flags(net, net_tf);

  // --- montecarlo -------------------------------------------------------
  auto* mc = app.add_subcommand("montecarlo",
                                "Size/power experiment over simulated panels");
  mc->fallthrough();
  int mc_dgp = 1, mc_reps = 1000, mc_lags = 1, mc_threads = 0;
  std::vector<int> mc_k{10};
  std::vector<int> mc_t{100};
  std::vector<double> mc_rho{0.0};
  std::vector<std::string> mc_tune{"bic"};
  std::string mc_stat = "lmf", mc_hyp = "size", mc_out, mc_json;
  std::string mc_handling = "exclude";
  double mc_alpha = 0.05;
  std::uint64_t mc_seed = 20240101;
  TuneFlags mc_tf;
  mc->add_option("--dgp", mc_dgp, "Design 1, 2 or 3")->capture_default_str();
  mc->add_option("--k", mc_k, "Series counts, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--t", mc_t, "Sample sizes, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--rho", mc_rho, "Innovation correlations, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--reps", mc_reps, "Replications per cell")
      ->capture_default_str();
  mc->add_option("--lags", mc_lags, "Fitted VAR order")->capture_default_str();
  mc->add_option("--tune", mc_tune,
                 "Rules to compare (comma separated, or 'all')")
      ->delimiter(',')
      ->capture_default_str();
  mc->add_option("--stat", mc_stat, "Statistic: lmf|lmchi2|wald|waldf|het")
      ->capture_default_str();
  mc->add_option("--alpha", mc_alpha, "Nominal level")->capture_default_str();
  mc->add_option("--hypothesis", mc_hyp, "size|power|both")
      ->capture_default_str();
  mc->add_option("--gc-handling", mc_handling,
                 "exclude|keep-unpenalized|keep-penalized")
      ->capture_default_str();
  mc->add_option("--seed", mc_seed, "Base seed")->capture_default_str();
  int mc_burn = hdgc::kDefaultBurnIn;
  mc->add_option("--burn-in", mc_burn, "Simulation burn-in length")
      ->capture_default_str();
  mc->add_option("--threads", mc_threads, "Worker threads (0 = auto)")
      ->capture_default_str();
  mc->add_option("--out", mc_out, "Output CSV path");
  mc->add_option("--json", mc_json, "Also write results as JSON here");
  add_tuning_flags(mc, mc_tf, /*single_rule=*/false);

  // --- medrv ------------------------------------------------------------
  auto* med = app.add_subcommand(
      "medrv", "Daily median realized variance from intraday returns");
  med->fallthrough();
  std::string med_data, med_out;
  int med_m = 0;
  bool med_log = false;
  med->add_option("--data", med_data, "Intraday return CSV (days*m rows)")
      ->required();
  med->add_option("--m", med_m, "Intraday returns per day")->required();
  med->add_flag("--log", med_log, "Write log(MedRV)");
  med->add_option("--out", med_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return run_simulate(sim_dgp, sim_k, sim_t, sim_rho, sim_hyp, sim_seed,
                          sim_burn, sim_out);

    if (test->parsed()) {
      const auto panel = hdgc::read_panel_csv(test_data);
      hdgc::GCTestSpec spec;
      spec.target = int(require_series(panel, test_target));
      for (const auto& name : test_causes)
        spec.causes.push_back(int(require_series(panel, name)));
      spec.lags = test_lags;
      spec.vhar = test_vhar;
      spec.tuning = make_rule(test_tf, test_tf.tune);
      spec.statistic = hdgc::stat_kind_from_name(test_stat);
      spec.alpha = test_alpha;
      spec.gc_handling = parse_gc_handling(test_handling);
      const auto result = hdgc::run_gc_test(panel, spec);
      const auto j = hdgc::to_json(result);
      std::cout << j.dump(2) << "\n";
      if (!test_out.empty()) write_text(test_out, j.dump(2) + "\n");
      return 0;
    }

    if (net->parsed()) {
      const auto panel = hdgc::read_panel_csv(net_data);
      hdgc::NetworkOptions opts;
      if (net_design != "var" && net_design != "vhar")
        throw std::runtime_error("--design must be var|vhar");
      opts.design =
          net_design == "vhar" ? hdgc::DesignKind::Vhar : hdgc::DesignKind::Var;
      opts.lags = net_lags;
      opts.tuning = make_rule(net_tf, net_tf.tune);
      if (!net_stat.empty()) {
        opts.statistic = hdgc::stat_kind_from_name(net_stat);
        opts.stat_overridden = true;
      }
      opts.alpha = net_alpha;
      opts.gc_handling = parse_gc_handling(net_handling);
      opts.threads = net_threads;

      const auto write_graph = [&](const hdgc::SpilloverNetwork& network,
                                   const std::string& prefix) {
        const auto skeleton = hdgc::UndirectedGraph::skeleton(network);
        const auto communities = hdgc::girvan_newman(skeleton);
        write_text(prefix + ".json",
                   hdgc::network_to_json(network, &communities).dump(2) + "\n");
        write_text(prefix + ".dot",
                   hdgc::network_to_dot(network, &communities));
        write_text(prefix + "_edges.csv", hdgc::network_edges_csv(network));
        std::cout << prefix << ": " << network.edges.size() << " edges, "
                  << "modularity " << hdgc::format_double(communities.modularity)
                  << ", " << network.failures.size() << " failed pairs\n";
      };

      write_graph(hdgc::spillover_network(panel, opts), net_prefix);
      if (net_baseline) {
        hdgc::NetworkOptions base = opts;
        base.baseline = true;
        write_graph(hdgc::spillover_network(panel, base),
                    net_prefix + "_baseline");
      }
      return 0;
    }

    if (mc->parsed()) {
      hdgc::McConfig config;
      config.dgp = mc_dgp;
      config.k_list = mc_k;
      config.t_list = mc_t;
      config.rho_list = mc_rho;
      config.replications = mc_reps;
      config.lags = mc_lags;
      if (mc_tune.size() == 1 && mc_tune.front() == "all")
        mc_tune = {"aic", "bic", "ebic", "plugin", "tscv"};
      config.rules.clear();
      config.rule_names.clear();
      for (const auto& name : mc_tune) {
        config.rules.push_back(make_rule(mc_tf, name));
        config.rule_names.push_back(name);
      }
      config.statistic = hdgc::stat_kind_from_name(mc_stat);
      config.gc_handling = parse_gc_handling(mc_handling);
      config.alpha = mc_alpha;
      if (mc_hyp == "size") {
        config.size_rows = true;
        config.power_rows = false;
      } else if (mc_hyp == "power") {
        config.size_rows = false;
        config.power_rows = true;
      } else if (mc_hyp == "both") {
        config.size_rows = true;
        config.power_rows = true;
      } else {
        throw std::runtime_error("--hypothesis must be size|power|both");
      }
      config.seed = mc_seed;
      config.burn_in = mc_burn;
      config.threads = mc_threads;

      const auto cells = hdgc::run_montecarlo(config);
      const auto csv = hdgc::mc_table_csv(cells);
      std::cout << csv;
      if (!mc_out.empty()) write_text(mc_out, csv);
      if (!mc_json.empty())
        write_text(mc_json, hdgc::mc_table_json(cells).dump(2) + "\n");
      return 0;
    }

    if (med->parsed()) {
      const auto intraday = hdgc::read_panel_csv(med_data);
      const auto daily = hdgc::medrv_panel(intraday.data, med_m);
      hdgc::TimeSeriesPanel out;
      out.names = intraday.names;
      out.data = daily;
      if (med_log) {
        for (long r = 0; r < out.data.rows(); ++r)
          for (long c = 0; c < out.data.cols(); ++c) {
            if (!(out.data(r, c) > 0))
              throw std::runtime_error(
                  "medrv: nonpositive variance at day " + std::to_string(r + 1) +
                  ", series '" + out.names[size_t(c)] + "'; cannot take logs");
            out.data(r, c) = std::log(out.data(r, c));
          }
      }
      hdgc::write_panel_csv(out, med_out);
      std::cout << "wrote " << out.data.rows() << " x " << out.data.cols()
                << " MedRV panel to " << med_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
