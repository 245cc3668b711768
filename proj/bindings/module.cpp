#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "hdgc/montecarlo.hpp"
#include "hdgc/network.hpp"
#include "hdgc/pdslm.hpp"
#include "hdgc/serialize.hpp"
#include "hdgc/stats.hpp"
#include "hdgc/varsim.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null:
      return py::none();
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& el : j) out.append(json_to_py(el));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

hdgc::TimeSeriesPanel make_panel(const Eigen::MatrixXd& data,
                                 std::vector<std::string> names) {
  hdgc::TimeSeriesPanel panel;
  panel.data = data;
  panel.names = names.empty() ? hdgc::default_series_names(int(data.cols()))
                              : std::move(names);
  panel.validate();
  return panel;
}

hdgc::TuningRule make_rule(const std::string& tune, double ebic_gamma,
                           double plugin_alpha, double plugin_c, int folds,
                           double min_train_fraction, double fixed_lambda,
                           bool enforce_bound, double bound_fraction,
                           int n_lambda, double grid_ratio, bool adaptive) {
  hdgc::TuningRule rule;
  rule.kind = hdgc::tune_kind_from_name(tune);
  rule.ebic_gamma = ebic_gamma;
  rule.plugin_alpha = plugin_alpha;
  rule.plugin_c = plugin_c;
  rule.tscv_folds = folds;
  rule.tscv_min_train_fraction = min_train_fraction;
  rule.fixed_lambda = fixed_lambda;
  rule.enforce_bound = enforce_bound;
  rule.lower_bound_fraction = bound_fraction;
  rule.n_lambda = n_lambda;
  rule.grid_ratio = grid_ratio;
  rule.adaptive = adaptive;
  return rule;
}

hdgc::Hypothesis parse_hypothesis(const std::string& name) {
  if (name == "null") return hdgc::Hypothesis::Null;
  if (name == "alternative") return hdgc::Hypothesis::Alternative;
  throw std::invalid_argument("hypothesis must be 'null' or 'alternative'");
}

}  // namespace

PYBIND11_MODULE(_hdgc, m) {
  m.doc() = "High-dimensional Granger causality testing";

  m.def(
      "simulate_dgp",
      [](int dgp, int k, long t, double rho, const std::string& hypothesis,
         std::uint64_t seed, int burn_in) {
        const auto coeffs = hdgc::build_dgp(dgp, k, parse_hypothesis(hypothesis));
        const auto sigma = hdgc::toeplitz_sigma(k, rho);
        const auto panel = hdgc::simulate_var(coeffs, sigma, t, burn_in, seed);
        return py::make_tuple(panel.data, panel.names);
      },
      py::arg("dgp"), py::arg("k"), py::arg("t"), py::arg("rho") = 0.0,
      py::arg("hypothesis") = "null", py::arg("seed") = 1,
      py::arg("burn_in") = hdgc::kDefaultBurnIn,
      "Simulate one of the built-in VAR designs; returns (data, names).");

  m.def(
      "simulate_var",
      [](const std::vector<Eigen::MatrixXd>& lags,
         const Eigen::MatrixXd& sigma, long t, int burn_in,
         std::uint64_t seed) {
        const hdgc::VarCoefficients coeffs{lags};
        const auto panel =
            hdgc::simulate_var(coeffs, hdgc::InnovationSpec{sigma}, t, burn_in,
                               seed);
        return py::make_tuple(panel.data, panel.names);
      },
      py::arg("lags"), py::arg("sigma"), py::arg("t"),
      py::arg("burn_in") = hdgc::kDefaultBurnIn, py::arg("seed") = 1,
      "Simulate a VAR from explicit lag matrices; returns (data, names).");

  m.def(
      "stability",
      [](const std::vector<Eigen::MatrixXd>& lags) {
        const auto report = hdgc::stability_check(hdgc::VarCoefficients{lags});
        py::dict out;
        out["stable"] = report.stable;
        out["spectral_radius"] = report.spectral_radius;
        return out;
      },
      py::arg("lags"), "Companion-matrix stability of a VAR.");

  m.def(
      "gc_test",
      [](const Eigen::MatrixXd& data, std::vector<std::string> names,
         int target, const std::vector<int>& causes, int lags, bool vhar,
         const std::string& stat, const std::string& tune, double alpha,
         const std::string& gc_handling, double ebic_gamma,
         double plugin_alpha, double plugin_c, int folds,
         double min_train_fraction, double fixed_lambda, bool enforce_bound,
         double bound_fraction, int n_lambda, double grid_ratio,
         bool adaptive) {
        const auto panel = make_panel(data, std::move(names));
        hdgc::GCTestSpec spec;
        spec.target = target;
        spec.causes = causes;
        spec.lags = lags;
        spec.vhar = vhar;
        spec.statistic = hdgc::stat_kind_from_name(stat);
        spec.tuning = make_rule(tune, ebic_gamma, plugin_alpha, plugin_c,
                                folds, min_train_fraction, fixed_lambda,
                                enforce_bound, bound_fraction, n_lambda,
                                grid_ratio, adaptive);
        spec.alpha = alpha;
        if (gc_handling == "exclude")
          spec.gc_handling = hdgc::GcHandling::ExcludeThenReinsert;
        else if (gc_handling == "keep-unpenalized")
          spec.gc_handling = hdgc::GcHandling::KeepUnpenalized;
        else if (gc_handling == "keep-penalized")
          spec.gc_handling = hdgc::GcHandling::KeepPenalized;
        else
          throw std::invalid_argument("bad gc_handling");
        return json_to_py(hdgc::to_json(hdgc::run_gc_test(panel, spec)));
      },
      py::arg("data"), py::arg("names") = std::vector<std::string>{},
      py::arg("target") = 0, py::arg("causes") = std::vector<int>{1},
      py::arg("lags") = 1, py::arg("vhar") = false, py::arg("stat") = "lmf",
      py::arg("tune") = "bic", py::arg("alpha") = 0.05,
      py::arg("gc_handling") = "exclude", py::arg("ebic_gamma") = 0.5,
      py::arg("plugin_alpha") = 0.05, py::arg("plugin_c") = 0.5,
      py::arg("folds") = 5, py::arg("min_train_fraction") = 0.5,
      py::arg("fixed_lambda") = 0.0, py::arg("enforce_bound") = true,
      py::arg("bound_fraction") = 0.5, py::arg("n_lambda") = 100,
      py::arg("grid_ratio") = 0.0, py::arg("adaptive") = false,
      "Post-double-selection Granger causality test; returns a result dict.");

  m.def(
      "bivariate_gc_test",
      [](const Eigen::MatrixXd& data, std::vector<std::string> names,
         int target, int cause, int lags) {
        const auto panel = make_panel(data, std::move(names));
        return json_to_py(
            hdgc::to_json(hdgc::bivariate_gc_test(panel, target, cause, lags)));
      },
      py::arg("data"), py::arg("names") = std::vector<std::string>{},
      py::arg("target") = 0, py::arg("cause") = 1, py::arg("lags") = 1,
      "Classical two-series Granger F test.");

  m.def(
      "medrv",
      [](const Eigen::VectorXd& returns) { return hdgc::medrv(returns); },
      py::arg("returns"), "Median realized variance of one day of returns.");

  m.def(
      "medrv_panel",
      [](const Eigen::MatrixXd& intraday, int m) {
        return hdgc::medrv_panel(intraday, m);
      },
      py::arg("intraday"), py::arg("m"),
      "Daily MedRV per series from stacked intraday returns.");

  m.def(
      "spillover_network",
      [](const Eigen::MatrixXd& data, std::vector<std::string> names,
         const std::string& design, int lags, const std::string& stat,
         const std::string& tune, double alpha, bool baseline, int threads) {
        const auto panel = make_panel(data, std::move(names));
        hdgc::NetworkOptions opts;
        if (design == "vhar")
          opts.design = hdgc::DesignKind::Vhar;
        else if (design == "var")
          opts.design = hdgc::DesignKind::Var;
        else
          throw std::invalid_argument("design must be 'var' or 'vhar'");
        opts.lags = lags;
        if (!stat.empty()) {
          opts.statistic = hdgc::stat_kind_from_name(stat);
          opts.stat_overridden = true;
        }
        opts.tuning = make_rule(tune, 0.5, 0.05, 0.5, 5, 0.5, 0.0, true, 0.5,
                                100, 0.0, false);
        opts.alpha = alpha;
        opts.baseline = baseline;
        opts.threads = threads;
        const auto net = hdgc::spillover_network(panel, opts);
        const auto communities =
            hdgc::girvan_newman(hdgc::UndirectedGraph::skeleton(net));
        return json_to_py(hdgc::network_to_json(net, &communities));
      },
      py::arg("data"), py::arg("names") = std::vector<std::string>{},
      py::arg("design") = "var", py::arg("lags") = 1, py::arg("stat") = "",
      py::arg("tune") = "bic", py::arg("alpha") = 0.01,
      py::arg("baseline") = false, py::arg("threads") = 0,
      "All-pairs spillover network with Girvan-Newman communities.");

  m.def(
      "girvan_newman",
      [](int n, const std::vector<std::pair<int, int>>& edges) {
        const auto graph = hdgc::UndirectedGraph::from_edges(n, edges);
        const auto part = hdgc::girvan_newman(graph);
        py::dict out;
        out["assignment"] = part.assignment;
        out["modularity"] = part.modularity;
        return out;
      },
      py::arg("n"), py::arg("edges"),
      "Edge-betweenness communities of an undirected graph.");

  m.def(
      "edge_betweenness",
      [](int n, const std::vector<std::pair<int, int>>& edges) {
        const auto graph = hdgc::UndirectedGraph::from_edges(n, edges);
        py::dict out;
        out["edges"] = graph.edges;
        out["betweenness"] = hdgc::edge_betweenness(graph);
        return out;
      },
      py::arg("n"), py::arg("edges"),
      "Shortest-path edge betweenness (unordered pairs).");

  m.def(
      "run_montecarlo",
      [](int dgp, const std::vector<int>& k, const std::vector<int>& t,
         const std::vector<double>& rho, int reps,
         const std::vector<std::string>& tune, const std::string& stat,
         const std::string& hypothesis, int lags, double alpha,
         std::uint64_t seed, int threads) {
        hdgc::McConfig config;
        config.dgp = dgp;
        config.k_list = k;
        config.t_list = t;
        config.rho_list = rho;
        config.replications = reps;
        config.lags = lags;
        config.rules.clear();
        config.rule_names.clear();
        for (const auto& name : tune) {
          config.rules.push_back(make_rule(name, 0.5, 0.05, 0.5, 5, 0.5, 0.0,
                                           true, 0.5, 100, 0.0, false));
          config.rule_names.push_back(name);
        }
        config.statistic = hdgc::stat_kind_from_name(stat);
        config.alpha = alpha;
        if (hypothesis == "size") {
          config.size_rows = true;
          config.power_rows = false;
        } else if (hypothesis == "power") {
          config.size_rows = false;
          config.power_rows = true;
        } else if (hypothesis == "both") {
          config.size_rows = true;
          config.power_rows = true;
        } else {
          throw std::invalid_argument("hypothesis must be size|power|both");
        }
        config.seed = seed;
        config.threads = threads;
        return json_to_py(hdgc::mc_table_json(hdgc::run_montecarlo(config)));
      },
      py::arg("dgp") = 1, py::arg("k") = std::vector<int>{10},
      py::arg("t") = std::vector<int>{100},
      py::arg("rho") = std::vector<double>{0.0}, py::arg("reps") = 1000,
      py::arg("tune") = std::vector<std::string>{"bic"},
      py::arg("stat") = "lmf", py::arg("hypothesis") = "size",
      py::arg("lags") = 1, py::arg("alpha") = 0.05,
      py::arg("seed") = 20240101, py::arg("threads") = 0,
      "Size/power rejection rates over simulated panels.");

  m.def("chi2_sf", &hdgc::stats::chi2_sf, py::arg("x"), py::arg("dof"));
  m.def("f_sf", &hdgc::stats::f_sf, py::arg("x"), py::arg("d1"),
        py::arg("d2"));
  m.def("norm_quantile", &hdgc::stats::norm_quantile, py::arg("p"));
  m.def("norm_cdf", &hdgc::stats::norm_cdf, py::arg("x"));

  m.attr("__version__") = "0.1.0";
}
