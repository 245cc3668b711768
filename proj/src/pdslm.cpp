#include "hdgc/pdslm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hdgc/stats.hpp"

namespace hdgc {

std::string stat_kind_name(StatKind kind) {
  switch (kind) {
    case StatKind::LmChi2: return "lmchi2";
    case StatKind::LmF: return "lmf";
    case StatKind::Wald: return "wald";
    case StatKind::WaldF: return "waldf";
    case StatKind::LmHet: return "het";
    case StatKind::BivariateF: return "bivf";
  }
  return "?";
}

StatKind stat_kind_from_name(const std::string& name) {
  if (name == "lmchi2") return StatKind::LmChi2;
  if (name == "lmf") return StatKind::LmF;
  if (name == "wald") return StatKind::Wald;
  if (name == "waldf") return StatKind::WaldF;
  if (name == "het") return StatKind::LmHet;
  if (name == "bivf") return StatKind::BivariateF;
  throw std::invalid_argument("unknown statistic '" + name + "'");
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& X, const std::vector<int>& cols) {
  Eigen::MatrixXd out(X.rows(), long(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) out.col(long(i)) = X.col(cols[i]);
  return out;
}

}  // namespace

OlsResult ols_centered(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       int protect_leading) {
  const long n = X.rows();
  const long m = X.cols();
  if (n != y.size())
    throw std::invalid_argument("ols: X rows and y length differ");
  if (n < 2) throw std::invalid_argument("ols: need at least 2 rows");

  OlsResult out;
  const Eigen::VectorXd yc = y.array() - y.mean();
  if (m == 0) {
    out.beta.resize(0);
    out.resid = yc;
    out.sse = yc.squaredNorm();
    out.rank = 0;
    return out;
  }

  Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
  out.rank = qr.rank();
  out.beta = Eigen::VectorXd::Zero(m);

  if (out.rank == m) {
    out.beta = qr.solve(yc);
    out.resid = yc - Xc * out.beta;
    out.sse = out.resid.squaredNorm();
    return out;
  }

  // Rank deficient: keep the pivoted independent columns, refit on those.
  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> kept(perm.data(), perm.data() + out.rank);
  std::sort(kept.begin(), kept.end());
  for (long j = 0; j < m; ++j)
    if (!std::binary_search(kept.begin(), kept.end(), int(j)))
      out.dropped.push_back(int(j));
  for (int j : out.dropped)
    if (j < protect_leading)
      throw std::runtime_error(
          "ols: a protected test column is collinear with the others");

  Eigen::MatrixXd sub(n, long(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) sub.col(long(i)) = Xc.col(kept[i]);
  const Eigen::VectorXd beta_kept = sub.householderQr().solve(yc);
  for (size_t i = 0; i < kept.size(); ++i) out.beta(kept[i]) = beta_kept(long(i));
  out.resid = yc - sub * beta_kept;
  out.sse = out.resid.squaredNorm();
  return out;
}

namespace {

struct Selection {
  std::vector<int> s_union;                 // global column ids, sorted
  std::vector<std::vector<int>> per_step;   // step 0 then one per GC column
  std::vector<TuningAudit> audits;
};

Selection run_selection(const DesignMatrix& d, const GCTestSpec& spec) {
  Selection sel;
  const Eigen::MatrixXd x_rest = gather(d.X, d.rest_cols);
  const std::set<int> gc_set(d.gc_cols.begin(), d.gc_cols.end());

  const auto to_global_rest = [&](const std::vector<int>& local) {
    std::vector<int> global;
    global.reserve(local.size());
    for (int j : local) global.push_back(d.rest_cols[size_t(j)]);
    return global;
  };
  // Selected sets never contain GC columns: those are reinserted in the
  // scoring stage no matter what, so keeping them here would double-count.
  const auto strip_gc = [&](const std::vector<int>& global) {
    std::vector<int> out;
    for (int j : global)
      if (!gc_set.count(j)) out.push_back(j);
    return out;
  };

  const bool exclude = spec.gc_handling == GcHandling::ExcludeThenReinsert;
  const double gc_weight =
      spec.gc_handling == GcHandling::KeepUnpenalized ? 0.0 : 1.0;

  // Step 1: the target equation without the candidate-cause columns.
  if (exclude) {
    SelectedFit s0 = tune_and_fit(x_rest, d.y, spec.tuning);
    sel.per_step.push_back(to_global_rest(s0.fit.active));
    sel.audits.push_back(std::move(s0.audit));
  } else {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(d.n_cols());
    for (int j : d.gc_cols) w(j) = gc_weight;
    SelectedFit s0 = tune_and_fit(d.X, d.y, spec.tuning, &w);
    sel.per_step.push_back(strip_gc(s0.fit.active));
    sel.audits.push_back(std::move(s0.audit));
  }

  // Step 2: one lasso per cause column, regressed on the same candidates.
  for (int g : d.gc_cols) {
    const Eigen::VectorXd target_col = d.X.col(g);
    if (exclude) {
      SelectedFit sj = tune_and_fit(x_rest, target_col, spec.tuning);
      sel.per_step.push_back(to_global_rest(sj.fit.active));
      sel.audits.push_back(std::move(sj.audit));
    } else {
      std::vector<int> cols = d.rest_cols;
      Eigen::VectorXd w = Eigen::VectorXd::Ones(d.n_cols() - 1);
      long at = long(cols.size());
      for (int other : d.gc_cols)
        if (other != g) {
          cols.push_back(other);
          w(at++) = gc_weight;
        }
      SelectedFit sj =
          tune_and_fit(gather(d.X, cols), target_col, spec.tuning, &w);
      std::vector<int> global;
      for (int local : sj.fit.active) global.push_back(cols[size_t(local)]);
      sel.per_step.push_back(strip_gc(global));
      sel.audits.push_back(std::move(sj.audit));
    }
  }

  std::set<int> merged;
  for (const auto& step : sel.per_step) merged.insert(step.begin(), step.end());
  sel.s_union.assign(merged.begin(), merged.end());
  return sel;
}

DesignMatrix make_design(const TimeSeriesPanel& panel, const GCTestSpec& spec) {
  if (spec.causes.empty())
    throw std::invalid_argument("gc test: no cause series given");
  return spec.vhar
             ? build_vhar_design(panel, spec.target, spec.causes)
             : build_var_design(panel, spec.target, spec.causes, spec.lags);
}

void check_lm_feasible(long n_eff, long s_star, long g) {
  if (n_eff - s_star - g < 1)
    throw infeasible_error(
        "post-selection OLS infeasible: " + std::to_string(s_star) +
        " selected + " + std::to_string(g) + " cause columns vs " +
        std::to_string(n_eff) +
        " rows; enforce or raise the penalty lower bound");
}

GCTestResult base_result(const TimeSeriesPanel& panel, const DesignMatrix& d,
                         const GCTestSpec& spec, const Selection& sel) {
  GCTestResult r;
  r.target = panel.names[size_t(d.target)];
  for (int c : d.cause_series) r.causes.push_back(panel.names[size_t(c)]);
  r.alpha = spec.alpha;
  r.effective_rows = d.effective_rows();
  r.s_star = long(sel.s_union.size());
  for (const auto& step : sel.per_step) {
    std::vector<std::string> labels;
    labels.reserve(step.size());
    for (int j : step) labels.push_back(d.columns[size_t(j)].label);
    r.selected.push_back(std::move(labels));
  }
  r.audits = sel.audits;
  return r;
}

}  // namespace

GCTestResult pds_lm_test(const TimeSeriesPanel& panel, const GCTestSpec& spec) {
  if (spec.statistic != StatKind::LmChi2 && spec.statistic != StatKind::LmF)
    throw std::invalid_argument("pds_lm_test: statistic must be an LM kind");
  const DesignMatrix d = make_design(panel, spec);
  const Selection sel = run_selection(d, spec);

  const long n_eff = d.effective_rows();
  const long g = long(d.gc_cols.size());
  const long s_star = long(sel.s_union.size());
  check_lm_feasible(n_eff, s_star, g);

  // Restricted model: target on the selected union only.
  const OlsResult restricted = ols_centered(gather(d.X, sel.s_union), d.y);
  const Eigen::VectorXd& xi = restricted.resid;
  const double ss_xi = xi.squaredNorm();

  // Score stage: the restricted residuals against causes plus the union.
  std::vector<int> aux_cols = d.gc_cols;
  aux_cols.insert(aux_cols.end(), sel.s_union.begin(), sel.s_union.end());
  const OlsResult aux = ols_centered(gather(d.X, aux_cols), xi, int(g));

  GCTestResult r = base_result(panel, d, spec, sel);
  r.kind = spec.statistic;
  r.dof_num = int(g);
  r.dropped_collinear = int(restricted.dropped.size() + aux.dropped.size());

  double r2 = 0.0;
  if (ss_xi > 0) r2 = std::clamp(1.0 - aux.sse / ss_xi, 0.0, 1.0);
  r.r_squared = r2;

  if (spec.statistic == StatKind::LmChi2) {
    r.statistic = double(n_eff) * r2;
    r.p_value = stats::chi2_sf(r.statistic, double(g));
  } else {
    const long den = n_eff - s_star - g;
    r.dof_den = den;
    if (1.0 - r2 < 1e-14) {
      r.statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    } else {
      r.statistic = (double(den) / double(g)) * r2 / (1.0 - r2);
      r.p_value = stats::f_sf(r.statistic, double(g), double(den));
    }
  }
  r.reject = r.p_value < spec.alpha;
  return r;
}

GCTestResult pds_wald_test(const TimeSeriesPanel& panel,
                           const GCTestSpec& spec) {
  if (spec.statistic != StatKind::Wald && spec.statistic != StatKind::WaldF)
    throw std::invalid_argument("pds_wald_test: statistic must be a Wald kind");
  const DesignMatrix d = make_design(panel, spec);
  const Selection sel = run_selection(d, spec);

  const long n_eff = d.effective_rows();
  const long g = long(d.gc_cols.size());
  const long s_star = long(sel.s_union.size());
  if (n_eff - (s_star + g) - 1 < 1)
    throw infeasible_error(
        "wald: too many selected regressors for the variance estimate; "
        "enforce or raise the penalty lower bound");

  std::vector<int> cols = d.gc_cols;
  cols.insert(cols.end(), sel.s_union.begin(), sel.s_union.end());
  Eigen::MatrixXd Xall = gather(d.X, cols);
  const OlsResult fit = ols_centered(Xall, d.y, int(g));

  // Classical covariance on the columns that survived the rank check.
  std::vector<int> kept;
  for (long j = 0; j < Xall.cols(); ++j)
    if (!std::binary_search(fit.dropped.begin(), fit.dropped.end(), int(j)))
      kept.push_back(int(j));
  Eigen::MatrixXd Xc = Xall.rowwise() - Xall.colwise().mean();
  Eigen::MatrixXd Xk(Xc.rows(), long(kept.size()));
  Eigen::VectorXd beta_k(long(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) {
    Xk.col(long(i)) = Xc.col(kept[i]);
    beta_k(long(i)) = fit.beta(kept[i]);
  }
  const long k_model = long(kept.size());
  const long var_dof = n_eff - k_model - 1;  // centering eats one df
  const double sigma2 = fit.sse / double(var_dof);

  const Eigen::MatrixXd xtx = Xk.transpose() * Xk;
  const Eigen::MatrixXd xtx_inv = xtx.ldlt().solve(
      Eigen::MatrixXd::Identity(k_model, k_model));
  // GC columns are the leading block by construction and are never dropped.
  const Eigen::MatrixXd cov_gc = sigma2 * xtx_inv.topLeftCorner(g, g);
  const Eigen::VectorXd b_gc = beta_k.head(g);
  const double wald = b_gc.dot(cov_gc.ldlt().solve(b_gc));

  GCTestResult r = base_result(panel, d, spec, sel);
  r.kind = spec.statistic;
  r.dof_num = int(g);
  r.dropped_collinear = int(fit.dropped.size());
  const double ss_y = (d.y.array() - d.y.mean()).square().sum();
  r.r_squared = ss_y > 0 ? std::clamp(1.0 - fit.sse / ss_y, 0.0, 1.0) : 0.0;

  if (spec.statistic == StatKind::Wald) {
    r.statistic = wald;
    r.p_value = stats::chi2_sf(wald, double(g));
  } else {
    r.dof_den = var_dof;
    r.statistic = wald / double(g);
    r.p_value = stats::f_sf(r.statistic, double(g), double(var_dof));
  }
  r.reject = r.p_value < spec.alpha;
  return r;
}

GCTestResult pds_lm_het_robust(const TimeSeriesPanel& panel,
                               const GCTestSpec& spec) {
  if (spec.statistic != StatKind::LmHet)
    throw std::invalid_argument("pds_lm_het_robust: statistic must be het");
  const DesignMatrix d = make_design(panel, spec);
  const Selection sel = run_selection(d, spec);

  const long n_eff = d.effective_rows();
  const long g = long(d.gc_cols.size());
  const long s_star = long(sel.s_union.size());
  check_lm_feasible(n_eff, s_star, g);

  const Eigen::MatrixXd Xs = gather(d.X, sel.s_union);
  const OlsResult restricted = ols_centered(Xs, d.y);
  const Eigen::VectorXd& xi = restricted.resid;

  // Score columns: products of the restricted residual with each cause
  // column's own residual after projecting on the union.
  Eigen::MatrixXd pi(n_eff, g);
  int dropped = int(restricted.dropped.size());
  for (long idx = 0; idx < g; ++idx) {
    const OlsResult proj =
        ols_centered(Xs, d.X.col(d.gc_cols[size_t(idx)]));
    dropped += int(proj.dropped.size());
    pi.col(idx) = xi.cwiseProduct(proj.resid);
  }

  // No intercept here: the statistic lives in the regression of a one-vector
  // on the score columns.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n_eff);
  const Eigen::VectorXd delta = pi.colPivHouseholderQr().solve(ones);
  const double ssr = (ones - pi * delta).squaredNorm();

  GCTestResult r = base_result(panel, d, spec, sel);
  r.kind = StatKind::LmHet;
  r.dof_num = int(g);
  r.dropped_collinear = dropped;
  r.statistic = std::max(0.0, double(n_eff) - ssr);
  r.p_value = stats::chi2_sf(r.statistic, double(g));
  const double ss_xi = xi.squaredNorm();
  r.r_squared = ss_xi > 0 ? std::clamp(1.0 - ssr / double(n_eff), 0.0, 1.0) : 0.0;
  r.reject = r.p_value < spec.alpha;
  return r;
}

namespace {

GCTestResult classical_f_on_design(const TimeSeriesPanel& panel,
                                   const DesignMatrix& d, double alpha) {
  const long n_eff = d.effective_rows();
  const long g = long(d.gc_cols.size());
  const long m = d.n_cols();
  const long den = n_eff - m - 1;
  if (den < 1)
    throw std::invalid_argument(
        "bivariate test: sample too short for the full model");

  const OlsResult unrestricted = ols_centered(d.X, d.y, int(m));
  const OlsResult restricted = ols_centered(gather(d.X, d.rest_cols), d.y);

  GCTestResult r;
  r.target = panel.names[size_t(d.target)];
  for (int c : d.cause_series) r.causes.push_back(panel.names[size_t(c)]);
  r.kind = StatKind::BivariateF;
  r.alpha = alpha;
  r.effective_rows = n_eff;
  r.dof_num = int(g);
  r.dof_den = den;
  r.s_star = long(d.rest_cols.size());
  std::vector<std::string> own;
  for (int j : d.rest_cols) own.push_back(d.columns[size_t(j)].label);
  r.selected.push_back(std::move(own));

  if (unrestricted.sse <= 0) {
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
  } else {
    const double num =
        std::max(0.0, restricted.sse - unrestricted.sse) / double(g);
    r.statistic = num / (unrestricted.sse / double(den));
    r.p_value = stats::f_sf(r.statistic, double(g), double(den));
  }
  r.reject = r.p_value < alpha;
  return r;
}

}  // namespace

GCTestResult bivariate_gc_test(const TimeSeriesPanel& panel, int target,
                               int cause, int p) {
  panel.validate();
  if (target == cause)
    throw std::invalid_argument("bivariate test: cause equals target");
  TimeSeriesPanel sub;
  sub.data.resize(panel.rows(), 2);
  sub.data.col(0) = panel.data.col(target);
  sub.data.col(1) = panel.data.col(cause);
  sub.names = {panel.names[size_t(target)], panel.names[size_t(cause)]};
  const DesignMatrix d = build_var_design(sub, 0, 1, p);
  return classical_f_on_design(sub, d, 0.05);
}

GCTestResult run_gc_test(const TimeSeriesPanel& panel, const GCTestSpec& spec) {
  switch (spec.statistic) {
    case StatKind::LmChi2:
    case StatKind::LmF:
      return pds_lm_test(panel, spec);
    case StatKind::Wald:
    case StatKind::WaldF:
      return pds_wald_test(panel, spec);
    case StatKind::LmHet:
      return pds_lm_het_robust(panel, spec);
    case StatKind::BivariateF: {
      if (spec.causes.size() != 1)
        throw std::invalid_argument(
            "bivariate test: exactly one cause series");
      TimeSeriesPanel sub;
      sub.data.resize(panel.rows(), 2);
      sub.data.col(0) = panel.data.col(spec.target);
      sub.data.col(1) = panel.data.col(spec.causes[0]);
      sub.names = {panel.names[size_t(spec.target)],
                   panel.names[size_t(spec.causes[0])]};
      const DesignMatrix d = spec.vhar
                                 ? build_vhar_design(sub, 0, 1)
                                 : build_var_design(sub, 0, 1, spec.lags);
      GCTestResult r = classical_f_on_design(sub, d, spec.alpha);
      return r;
    }
  }
  throw std::invalid_argument("run_gc_test: unknown statistic");
}

}  // namespace hdgc
