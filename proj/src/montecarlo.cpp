#include "hdgc/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace hdgc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mc_replication_seed(std::uint64_t base, int dgp, int k, int t,
                                  double rho, bool power, int replication) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ std::uint64_t(dgp));
  h = splitmix64(h ^ std::uint64_t(k));
  h = splitmix64(h ^ std::uint64_t(t));
  h = splitmix64(h ^ std::uint64_t(std::llround(rho * 1e6)));
  h = splitmix64(h ^ std::uint64_t(power ? 1 : 0));
  h = splitmix64(h ^ std::uint64_t(replication));
  return h;
}

std::vector<McCell> run_montecarlo(const McConfig& config) {
  if (config.replications < 1)
    throw std::invalid_argument("montecarlo: replications must be >= 1");
  if (config.rules.empty() || config.rules.size() != config.rule_names.size())
    throw std::invalid_argument("montecarlo: rules and names must align");
  if (config.k_list.empty() || config.t_list.empty() ||
      config.rho_list.empty())
    throw std::invalid_argument("montecarlo: empty k/t/rho list");
  if (!config.size_rows && !config.power_rows)
    throw std::invalid_argument("montecarlo: nothing to simulate");

  // Surface configuration errors before spending any simulation time.
  for (int k : config.k_list) {
    build_dgp(config.dgp, k, Hypothesis::Null);
    for (double rho : config.rho_list) toeplitz_sigma(k, rho);
  }

  std::vector<Hypothesis> hyps;
  if (config.size_rows) hyps.push_back(Hypothesis::Null);
  if (config.power_rows) hyps.push_back(Hypothesis::Alternative);

  const int n_rules = int(config.rules.size());
  const int reps = config.replications;
  std::vector<McCell> cells;

  for (Hypothesis hyp : hyps) {
    const bool power = hyp == Hypothesis::Alternative;
    for (double rho : config.rho_list)
      for (int k : config.k_list) {
        const VarCoefficients coeffs = build_dgp(config.dgp, k, hyp);
        const InnovationSpec sigma = toeplitz_sigma(k, rho);
        for (int t : config.t_list) {
          // outcome(rule, rep): 1 reject, 0 accept, -1 not run / infeasible.
          std::vector<std::vector<signed char>> outcome(
              size_t(n_rules), std::vector<signed char>(size_t(reps), -1));
          std::vector<std::atomic<bool>> rule_dead(static_cast<size_t>(n_rules));
          for (auto& flag : rule_dead) flag.store(false);

          const auto run_rep = [&](int rep) {
            bool any_alive = false;
            for (int ri = 0; ri < n_rules; ++ri)
              if (!rule_dead[size_t(ri)].load(std::memory_order_relaxed))
                any_alive = true;
            if (!any_alive) return;

            const std::uint64_t seed = mc_replication_seed(
                config.seed, config.dgp, k, t, rho, power, rep);
            const TimeSeriesPanel panel =
                simulate_var(coeffs, sigma, t, config.burn_in, seed);

            for (int ri = 0; ri < n_rules; ++ri) {
              // A rule that has already produced an infeasible replication is
              // NA for the whole cell; skipping it keeps hopeless cells cheap
              // without changing any reported number.
              if (rule_dead[size_t(ri)].load(std::memory_order_relaxed))
                continue;
              GCTestSpec spec;
              spec.target = 1;
              spec.causes = {0};
              spec.lags = config.lags;
              spec.tuning = config.rules[size_t(ri)];
              spec.statistic = config.statistic;
              spec.alpha = config.alpha;
              spec.gc_handling = config.gc_handling;
              try {
                const GCTestResult r = run_gc_test(panel, spec);
                outcome[size_t(ri)][size_t(rep)] = r.reject ? 1 : 0;
              } catch (const infeasible_error&) {
                rule_dead[size_t(ri)].store(true, std::memory_order_relaxed);
              } catch (const bound_infeasible_error&) {
                rule_dead[size_t(ri)].store(true, std::memory_order_relaxed);
              }
            }
          };

          unsigned workers =
              config.threads > 0
                  ? unsigned(config.threads)
                  : std::max(1u, std::thread::hardware_concurrency());
          workers = std::min<unsigned>(workers, unsigned(reps));
          if (workers <= 1) {
            for (int rep = 0; rep < reps; ++rep) run_rep(rep);
          } else {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
              pool.emplace_back([&] {
                for (int rep = next.fetch_add(1); rep < reps;
                     rep = next.fetch_add(1))
                  run_rep(rep);
              });
            for (auto& th : pool) th.join();
          }

          for (int ri = 0; ri < n_rules; ++ri) {
            McCell cell;
            cell.dgp = config.dgp;
            cell.power = power;
            cell.rho = rho;
            cell.t = t;
            cell.k = k;
            cell.rule = config.rule_names[size_t(ri)];
            cell.replications = reps;
            if (rule_dead[size_t(ri)].load()) {
              cell.feasible = false;
              cell.rejection_rate = std::numeric_limits<double>::quiet_NaN();
              for (signed char v : outcome[size_t(ri)])
                if (v < 0) ++cell.infeasible;
            } else {
              int rejections = 0;
              for (signed char v : outcome[size_t(ri)]) rejections += v == 1;
              cell.rejections = rejections;
              cell.rejection_rate = double(rejections) / double(reps);
            }
            cells.push_back(std::move(cell));
          }
        }
      }
  }
  return cells;
}

}  // namespace hdgc
