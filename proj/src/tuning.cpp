#include "hdgc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdgc/stats.hpp"

namespace hdgc {

std::string tune_kind_name(TuneKind kind) {
  switch (kind) {
    case TuneKind::Aic: return "aic";
    case TuneKind::Bic: return "bic";
    case TuneKind::Ebic: return "ebic";
    case TuneKind::Plugin: return "plugin";
    case TuneKind::Tscv: return "tscv";
    case TuneKind::Fixed: return "fixed";
  }
  return "?";
}

TuneKind tune_kind_from_name(const std::string& name) {
  if (name == "aic") return TuneKind::Aic;
  if (name == "bic") return TuneKind::Bic;
  if (name == "ebic") return TuneKind::Ebic;
  if (name == "plugin") return TuneKind::Plugin;
  if (name == "tscv") return TuneKind::Tscv;
  if (name == "fixed") return TuneKind::Fixed;
  throw std::invalid_argument("unknown tuning rule '" + name + "'");
}

TuningRule TuningRule::aic() { TuningRule r; r.kind = TuneKind::Aic; return r; }
TuningRule TuningRule::bic() { TuningRule r; r.kind = TuneKind::Bic; return r; }
TuningRule TuningRule::ebic(double gamma) {
  TuningRule r;
  r.kind = TuneKind::Ebic;
  r.ebic_gamma = gamma;
  return r;
}
TuningRule TuningRule::plugin() {
  TuningRule r;
  r.kind = TuneKind::Plugin;
  return r;
}
TuningRule TuningRule::tscv() {
  TuningRule r;
  r.kind = TuneKind::Tscv;
  return r;
}
TuningRule TuningRule::fixed(double lambda) {
  TuningRule r;
  r.kind = TuneKind::Fixed;
  r.fixed_lambda = lambda;
  return r;
}

double ic_penalty(TuneKind kind, long n, long m_total, double ebic_gamma) {
  if (n < 1) throw std::invalid_argument("ic_penalty: n must be >= 1");
  switch (kind) {
    case TuneKind::Aic:
      return 2.0;
    case TuneKind::Bic:
      return std::log(double(n));
    case TuneKind::Ebic:
      if (m_total < 1)
        throw std::invalid_argument("ic_penalty: m_total must be >= 1");
      return std::log(double(n)) + 2.0 * ebic_gamma * std::log(double(m_total));
    default:
      throw std::invalid_argument("ic_penalty: rule is not an IC");
  }
}

namespace {

long bound_cap(long n, double fraction) {
  return long(std::floor(fraction * double(n)));
}

std::vector<char> admissible_mask(const LassoPath& path, long n,
                                  const TuningRule& rule) {
  std::vector<char> mask(path.fits.size(), 1);
  if (!rule.enforce_bound) return mask;
  const long cap = bound_cap(n, rule.lower_bound_fraction);
  for (size_t i = 1; i < path.fits.size(); ++i)
    mask[i] = long(path.fits[i].active.size()) <= cap ? 1 : 0;
  return mask;  // the largest-lambda point is always admissible
}

}  // namespace

LassoPath penalty_lower_bound(const LassoPath& path, long n, double fraction) {
  const long cap = bound_cap(n, fraction);
  LassoPath out;
  for (size_t i = 0; i < path.fits.size(); ++i) {
    if (i > 0 && long(path.fits[i].active.size()) > cap) continue;
    out.lambdas.push_back(path.lambdas[i]);
    out.fits.push_back(path.fits[i]);
  }
  return out;
}

std::pair<double, TuningAudit> select_ic(const LassoPath& path,
                                         const TuningRule& rule, long n,
                                         long m_total) {
  if (path.fits.empty())
    throw std::invalid_argument("select_ic: empty path");
  const double penalty = ic_penalty(rule.kind, n, m_total, rule.ebic_gamma);

  TuningAudit audit;
  audit.rule = tune_kind_name(rule.kind);
  audit.grid = path.lambdas;
  audit.bound_enforced = rule.enforce_bound;
  audit.bound_cap =
      rule.enforce_bound ? int(bound_cap(n, rule.lower_bound_fraction)) : -1;
  audit.admissible = admissible_mask(path, n, rule);

  int best = -1;
  double best_value = 0.0;
  for (size_t i = 0; i < path.fits.size(); ++i) {
    const auto& fit = path.fits[i];
    const double df = double(fit.active.size());
    const double value =
        std::log(std::max(fit.sse, 1e-300) / double(n)) + penalty * df / double(n);
    audit.criterion.push_back(value);
    audit.active_counts.push_back(int(fit.active.size()));
    if (!audit.admissible[i]) continue;
    // Strict comparison: ties resolve to the earlier (larger) lambda.
    if (best < 0 || value < best_value) {
      best = int(i);
      best_value = value;
    }
  }
  if (best < 0)
    throw bound_infeasible_error(
        "select_ic: no admissible grid point under the penalty lower bound");
  audit.chosen_index = best;
  audit.chosen_lambda = path.lambdas[size_t(best)];
  return {audit.chosen_lambda, audit};
}

namespace {

struct PluginOutcome {
  double lambda = 0.0;
  TuningAudit audit;
  LassoFit fit;
};

PluginOutcome plugin_impl(const LassoProblem& prob, const TuningRule& rule) {
  const long n = prob.n();
  const long m = prob.m();
  const double quantile =
      stats::norm_quantile(1.0 - rule.plugin_alpha / (2.0 * double(m)));
  const auto lambda_for = [&](double sigma) {
    return 2.0 * rule.plugin_c * sigma * quantile / std::sqrt(double(n));
  };
  const double sd_y = std::sqrt(prob.yty / double(n));
  const auto check_sigma = [&](double sigma) {
    if (!(sigma > 1e-10 * std::max(sd_y, 1e-10)))
      throw std::runtime_error("plugin: residual variance is degenerate");
  };

  // Pilot sigma from OLS of y on the (up to) five columns most correlated
  // with it; on standardized columns |X'y| ranks correlations directly.
  const long q = std::min<long>(5, m);
  std::vector<long> order(static_cast<size_t>(m), 0);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + q, order.end(),
                    [&](long a, long b) {
                      return std::abs(prob.xty(a)) > std::abs(prob.xty(b));
                    });
  Eigen::MatrixXd x0(n, q);
  for (long i = 0; i < q; ++i) x0.col(i) = prob.X.col(order[size_t(i)]);
  const Eigen::VectorXd b0 = x0.colPivHouseholderQr().solve(prob.y);
  double sigma = std::sqrt((prob.y - x0 * b0).squaredNorm() / double(n));
  check_sigma(sigma);

  PluginOutcome out;
  out.audit.rule = "plugin";
  out.audit.sigma_updates.push_back(sigma);

  double lambda = lambda_for(sigma);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(m);
  for (int it = 0; it < rule.plugin_max_updates; ++it) {
    const LassoFit fit = solve(prob, lambda, &warm);
    warm = fit.beta_std;
    sigma = std::sqrt(fit.sse / double(n));
    check_sigma(sigma);
    out.audit.sigma_updates.push_back(sigma);
    const double next = lambda_for(sigma);
    const bool settled = std::abs(next - lambda) < 0.01 * lambda;
    lambda = next;
    if (settled) break;
  }
  out.fit = solve(prob, lambda, &warm);
  out.lambda = lambda;
  out.audit.chosen_lambda = lambda;
  out.audit.chosen_index = 0;
  out.audit.grid = {lambda};
  out.audit.criterion = {};
  out.audit.active_counts = {int(out.fit.active.size())};
  out.audit.admissible = {1};
  if (rule.enforce_bound) {
    out.audit.bound_enforced = true;
    out.audit.bound_cap = int(bound_cap(n, rule.lower_bound_fraction));
    if (long(out.fit.active.size()) > out.audit.bound_cap)
      throw bound_infeasible_error(
          "plugin: selected model exceeds the penalty lower bound");
  }
  return out;
}

}  // namespace

std::pair<double, TuningAudit> lambda_plugin(const LassoProblem& prob,
                                             const TuningRule& rule) {
  auto out = plugin_impl(prob, rule);
  return {out.lambda, out.audit};
}

std::pair<double, TuningAudit> select_tscv(const Eigen::MatrixXd& X_raw,
                                           const Eigen::VectorXd& y_raw,
                                           const Eigen::VectorXd& weights,
                                           const std::vector<double>& grid,
                                           const std::vector<char>& admissible,
                                           const TuningRule& rule) {
  const long n = X_raw.rows();
  if (grid.empty()) throw std::invalid_argument("tscv: empty grid");
  if (admissible.size() != grid.size())
    throw std::invalid_argument("tscv: admissible mask size mismatch");
  const int folds = rule.tscv_folds;
  if (folds < 1) throw std::invalid_argument("tscv: folds must be >= 1");
  const long t1 = long(std::floor(rule.tscv_min_train_fraction * double(n)));
  if (t1 < 2 || n - t1 < folds)
    throw std::runtime_error("tscv: insufficient rows for the fold layout");
  const long chunk = (n - t1) / folds;

  TuningAudit audit;
  audit.rule = "tscv";
  audit.grid = grid;
  audit.admissible = admissible;
  audit.bound_enforced = rule.enforce_bound;
  audit.bound_cap =
      rule.enforce_bound ? int(bound_cap(n, rule.lower_bound_fraction)) : -1;
  audit.fold_sse = Eigen::MatrixXd::Zero(folds, long(grid.size()));

  for (int f = 0; f < folds; ++f) {
    const long train_end = t1 + f * chunk;
    const long val_end = (f == folds - 1) ? n : train_end + chunk;
    // Standardization comes from the training window alone; validation rows
    // are transformed with those statistics, never their own.
    LassoProblem prob;
    try {
      prob = LassoProblem::from_raw(X_raw.topRows(train_end),
                                    y_raw.head(train_end), weights);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("tscv: training fold ") +
                               std::to_string(f + 1) + ": " + e.what());
    }
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(prob.m());
    for (size_t i = 0; i < grid.size(); ++i) {
      const LassoFit fit = solve(prob, grid[i], &warm);
      warm = fit.beta_std;
      double sse = 0.0;
      for (long r = train_end; r < val_end; ++r) {
        const double pred =
            prob.y_mean +
            (X_raw.row(r).transpose() - prob.col_mean).dot(fit.beta);
        const double err = y_raw(r) - pred;
        sse += err * err;
      }
      audit.fold_sse(f, long(i)) = sse;
    }
  }

  int best = -1;
  double best_value = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double total = audit.fold_sse.col(long(i)).sum();
    audit.criterion.push_back(total);
    if (!admissible[i]) continue;
    if (best < 0 || total < best_value) {
      best = int(i);
      best_value = total;
    }
  }
  if (best < 0)
    throw bound_infeasible_error(
        "tscv: no admissible grid point under the penalty lower bound");
  audit.chosen_index = best;
  audit.chosen_lambda = grid[size_t(best)];
  return {audit.chosen_lambda, audit};
}

SelectedFit tune_and_fit(const Eigen::MatrixXd& X_raw,
                         const Eigen::VectorXd& y_raw, const TuningRule& rule,
                         const Eigen::VectorXd* weights) {
  Eigen::VectorXd w = weights ? *weights : Eigen::VectorXd::Ones(X_raw.cols());

  if (rule.adaptive) {
    TuningRule pilot_rule = rule;
    pilot_rule.adaptive = false;
    const SelectedFit pilot = tune_and_fit(X_raw, y_raw, pilot_rule, &w);
    const Eigen::VectorXd reweight = adaptive_weights(
        pilot.fit, rule.adaptive_gamma, rule.adaptive_zero_floor);
    w = w.array() * reweight.array();  // keeps unpenalized columns free
    TuningRule final_rule = rule;
    final_rule.adaptive = false;
    SelectedFit out = tune_and_fit(X_raw, y_raw, final_rule, &w);
    out.audit.rule = "adaptive-" + out.audit.rule;
    return out;
  }

  const LassoProblem prob = LassoProblem::from_raw(X_raw, y_raw, w);
  const long n = prob.n();

  if (rule.kind == TuneKind::Fixed) {
    SelectedFit out;
    out.fit = solve(prob, rule.fixed_lambda);
    out.audit.rule = "fixed";
    out.audit.chosen_lambda = rule.fixed_lambda;
    out.audit.chosen_index = 0;
    out.audit.grid = {rule.fixed_lambda};
    out.audit.active_counts = {int(out.fit.active.size())};
    out.audit.admissible = {1};
    return out;
  }

  if (rule.kind == TuneKind::Plugin) {
    auto plugged = plugin_impl(prob, rule);
    return SelectedFit{std::move(plugged.fit), std::move(plugged.audit)};
  }

  const std::vector<double> grid =
      rule.grid_ratio > 0 ? lambda_grid(prob, rule.n_lambda, rule.grid_ratio)
                          : default_lambda_grid(prob, rule.n_lambda);
  const int cap =
      rule.enforce_bound ? int(bound_cap(n, rule.lower_bound_fraction)) : -1;
  const LassoPath path = fit_path(prob, grid, cap);

  if (rule.kind == TuneKind::Tscv) {
    // Admissibility comes from the full-sample fits; folds only score
    // prediction error. The grid is truncated to what was actually fitted
    // (the path can stop early once past the bound).
    std::vector<double> fitted_grid = path.lambdas;
    const auto mask = admissible_mask(path, n, rule);
    auto [lambda, audit] =
        select_tscv(X_raw, y_raw, w, fitted_grid, mask, rule);
    audit.active_counts.clear();
    for (const auto& fit : path.fits)
      audit.active_counts.push_back(int(fit.active.size()));
    return SelectedFit{path.fits[size_t(audit.chosen_index)], audit};
  }

  auto [lambda, audit] = select_ic(path, rule, n, prob.m());
  return SelectedFit{path.fits[size_t(audit.chosen_index)], audit};
}

}  // namespace hdgc
