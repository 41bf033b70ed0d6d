#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "weibtail/distributions.hpp"
#include "weibtail/errors.hpp"
#include "weibtail/estimators.hpp"
#include "weibtail/quantile.hpp"
#include "weibtail/selection.hpp"
#include "weibtail/stats.hpp"

namespace weibtail {

// Monte-Carlo plan mirroring the simulation study: N samples of size n,
// both estimators evaluated on every (tau, k) cell of each sample.
struct SimPlan {
  DistributionSpec spec;
  std::size_t n = 500;
  std::size_t replicates = 500;
  std::vector<double> taus = {2.0, 4.0};
  std::vector<std::size_t> k_grid;  // defaults to 2..360 clamped to n-1
  double rho_plugin = -1.0;
  std::uint64_t seed = 0;
};

inline std::vector<std::size_t> k_grid_range(std::size_t k_min, std::size_t k_max,
                                             std::size_t step = 1) {
  std::vector<std::size_t> g;
  for (std::size_t k = k_min; k <= k_max; k += step) g.push_back(k);
  return g;
}

// Normalizes and validates the plan; fills the default k grid.
inline SimPlan validated(SimPlan plan) {
  if (plan.n < 3) throw DomainError("SimPlan: n must be >= 3");
  if (plan.replicates < 1) throw DomainError("SimPlan: replicates must be >= 1");
  if (plan.taus.empty()) throw DomainError("SimPlan: need at least one tau");
  for (double t : plan.taus) {
    if (!(t > 1.0)) throw DomainError("SimPlan: tau exponents must be > 1");
  }
  if (!(plan.rho_plugin < 0.0) || !std::isfinite(plan.rho_plugin)) {
    throw DomainError("SimPlan: rho plug-in must be finite and < 0");
  }
  if (plan.k_grid.empty()) {
    plan.k_grid = k_grid_range(2, std::min<std::size_t>(360, plan.n - 1));
  }
  std::sort(plan.k_grid.begin(), plan.k_grid.end());
  plan.k_grid.erase(std::unique(plan.k_grid.begin(), plan.k_grid.end()),
                    plan.k_grid.end());
  if (plan.k_grid.front() < 2 || plan.k_grid.back() + 1 > plan.n) {
    throw KOutOfRange("SimPlan: k grid must lie inside [2, n-1]");
  }
  return plan;
}

namespace detail {

// Runs fn(r) for r = 0..count-1 on a worker pool. Any replicate failure
// aborts the whole run and is rethrown on the caller thread.
template <typename Fn>
void parallel_replicates(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// Per-replicate log-quantile estimates for every (tau, k) cell; the raw
// material behind the median and MSE curves.
struct RawEstimates {
  SimPlan plan;
  // indexed [tau][k][replicate]
  std::vector<std::vector<std::vector<double>>> log_classic;
  std::vector<std::vector<std::vector<double>>> log_reduced;
  std::vector<double> true_log_quantile;  // per tau
};

inline RawEstimates run_raw(const SimPlan& plan_in, unsigned threads = 0) {
  const SimPlan plan = validated(plan_in);
  const std::size_t nt = plan.taus.size();
  const std::size_t nk = plan.k_grid.size();
  const std::size_t nr = plan.replicates;

  RawEstimates raw;
  raw.plan = plan;
  raw.log_classic.assign(nt, std::vector<std::vector<double>>(
                                 nk, std::vector<double>(nr, 0.0)));
  raw.log_reduced.assign(nt, std::vector<std::vector<double>>(
                                 nk, std::vector<double>(nr, 0.0)));

  std::vector<double> probs(nt);
  raw.true_log_quantile.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    probs[t] = std::pow(static_cast<double>(plan.n), -plan.taus[t]);
    raw.true_log_quantile[t] = std::log(true_quantile(plan.spec, probs[t]));
  }

  const std::size_t k_max = plan.k_grid.back();
  detail::parallel_replicates(nr, threads, [&](std::size_t r) {
    Rng rng(plan.seed, r);
    const OrderedSample s = make_ordered(sample(plan.spec, plan.n, rng));
    const LogSpacings z = log_spacings(s, k_max);
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const std::size_t k = plan.k_grid[ki];
      const TailFit fit = ls_fit(z, k);
      for (std::size_t t = 0; t < nt; ++t) {
        raw.log_classic[t][ki][r] =
            quantile_classic(s, k, probs[t], fit.theta_tilde).log_value;
        raw.log_reduced[t][ki][r] =
            quantile_reduced_from_fit(s, fit, probs[t], plan.rho_plugin).log_value;
      }
    }
  });
  return raw;
}

// Per-(tau, k) aggregates of the raw estimates.
struct CurveOutput {
  SimPlan plan;
  struct Cell {
    double median_classic = 0.0;
    double median_reduced = 0.0;
    double mse_classic = 0.0;
    double mse_reduced = 0.0;
  };
  std::vector<std::vector<Cell>> cells;   // [tau][k]
  std::vector<double> true_log_quantile;  // per tau
};

inline CurveOutput aggregate_curves(const RawEstimates& raw) {
  CurveOutput out;
  out.plan = raw.plan;
  out.true_log_quantile = raw.true_log_quantile;
  const std::size_t nt = raw.plan.taus.size();
  const std::size_t nk = raw.plan.k_grid.size();
  out.cells.assign(nt, std::vector<CurveOutput::Cell>(nk));
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      auto& cell = out.cells[t][ki];
      cell.median_classic = median(raw.log_classic[t][ki]);
      cell.median_reduced = median(raw.log_reduced[t][ki]);
      cell.mse_classic =
          mean_squared_error(raw.log_classic[t][ki], raw.true_log_quantile[t]);
      cell.mse_reduced =
          mean_squared_error(raw.log_reduced[t][ki], raw.true_log_quantile[t]);
    }
  }
  return out;
}

inline CurveOutput run_curves(const SimPlan& plan, unsigned threads = 0) {
  return aggregate_curves(run_raw(plan, threads));
}

// Paired-boxplot experiment: the classical log-quantile at the oracle
// k_opt (true AMSE*) versus the per-sample adaptive k_hat.
struct BoxplotOutput {
  SimPlan plan;
  struct PerTau {
    double tau_exponent = 0.0;
    std::size_t k_opt = 0;
    std::vector<std::size_t> k_hat;             // per replicate
    std::vector<double> log_classic_at_k_opt;   // per replicate
    std::vector<double> log_classic_at_k_hat;   // per replicate
    double true_log_quantile = 0.0;
  };
  std::vector<PerTau> per_tau;
};

inline BoxplotOutput run_boxplots(const SimPlan& plan_in, unsigned threads = 0) {
  const SimPlan plan = validated(plan_in);
  const TailMeta meta = tail_meta(plan.spec);
  const std::size_t nt = plan.taus.size();
  const std::size_t nr = plan.replicates;
  const std::size_t k_max = plan.k_grid.back();

  BoxplotOutput out;
  out.plan = plan;
  out.per_tau.resize(nt);
  std::vector<double> probs(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto& bt = out.per_tau[t];
    probs[t] = std::pow(static_cast<double>(plan.n), -plan.taus[t]);
    bt.tau_exponent = plan.taus[t];
    bt.true_log_quantile = std::log(true_quantile(plan.spec, probs[t]));
    bt.k_opt = detail::argmin_curve(plan.k_grid, AmseKind::kTrue,
                                    [&](std::size_t k) {
                                      return amse_true(meta, plan.n, k, probs[t]);
                                    })
                   .k_hat;
    bt.k_hat.assign(nr, 0);
    bt.log_classic_at_k_opt.assign(nr, 0.0);
    bt.log_classic_at_k_hat.assign(nr, 0.0);
  }

  detail::parallel_replicates(nr, threads, [&](std::size_t r) {
    Rng rng(plan.seed, r);
    const OrderedSample s = make_ordered(sample(plan.spec, plan.n, rng));
    const LogSpacings z = log_spacings(s, k_max);
    for (std::size_t t = 0; t < nt; ++t) {
      auto& bt = out.per_tau[t];
      const std::size_t k_sel =
          detail::argmin_curve(plan.k_grid, AmseKind::kEstimated,
                               [&](std::size_t k) {
                                 return amse_estimated(z, k, probs[t]);
                               })
              .k_hat;
      bt.k_hat[r] = k_sel;
      bt.log_classic_at_k_opt[r] =
          quantile_classic(s, bt.k_opt, probs[t], theta_tilde(z, bt.k_opt))
              .log_value;
      bt.log_classic_at_k_hat[r] =
          quantile_classic(s, k_sel, probs[t], theta_tilde(z, k_sel)).log_value;
    }
  });
  return out;
}

// Limit parameters of the asymptotic normality results: (mu, sigma^2) for
// the bias-reduced estimator and their tilde counterparts for the
// classical one.
struct LimitParams {
  double mu_tau = 0.0;
  double sigma2_tau = 0.0;
  double mu_tilde_tau = 0.0;
  double sigma2_tilde_tau = 0.0;
};

inline LimitParams limit_params(double tau, double rho, double rho_plugin) {
  if (!(tau > 1.0)) throw DomainError("limit_params: tau must be > 1");
  if (!(rho < 0.0) || !std::isfinite(rho)) {
    throw DomainError("limit_params: rho must be finite and < 0");
  }
  if (!(rho_plugin < 0.0) || !std::isfinite(rho_plugin)) {
    throw DomainError("limit_params: rho plug-in must be finite and < 0");
  }
  const double k_plugin = k_rho(rho_plugin, tau);
  const double k_true = k_rho(rho, tau);
  const double lt = std::log(tau);
  LimitParams lim;
  lim.mu_tau = k_plugin - k_true;
  lim.sigma2_tau = (k_plugin - lt) * (k_plugin - lt);
  lim.mu_tilde_tau = lt - k_true;
  lim.sigma2_tilde_tau = lt * lt;
  return lim;
}

// Distributional summary of the normalized classical log-quantile errors,
//   sqrt(k)/log(tau_n) (log x_tilde - log x_p - bias_n),
// with the deterministic bias evaluated from the true tail metadata. The
// limit is N(0, theta^2); ks_statistic is taken against that law.
struct NormalitySummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double ks_statistic = 0.0;
  double theta = 0.0;
  std::size_t replicates = 0;
};

inline NormalitySummary normality_check(const DistributionSpec& spec,
                                        std::size_t n, std::size_t k,
                                        double tau_exponent,
                                        std::size_t replicates,
                                        std::uint64_t seed,
                                        unsigned threads = 0) {
  if (replicates < 2) {
    throw DomainError("normality_check: need at least 2 replicates");
  }
  const TailMeta meta = tail_meta(spec);
  const double p = std::pow(static_cast<double>(n), -tau_exponent);
  const double tau = tau_of(p, n, k);
  const double lt = std::log(tau);
  const double log_xp = std::log(true_quantile(spec, p));

  const double bval =
      meta.b(std::log(static_cast<double>(n) / static_cast<double>(k)));
  double bias = 0.0;
  if (bval != 0.0) {
    bias = bval * (lt * detail::design_power_sum(n, k, meta.rho) /
                       static_cast<double>(k) -
                   detail::k_rho_signed(meta.rho, tau));
  }

  std::vector<double> stat(replicates, 0.0);
  const double scale = std::sqrt(static_cast<double>(k)) / lt;
  detail::parallel_replicates(replicates, threads, [&](std::size_t r) {
    Rng rng(seed, r);
    const OrderedSample s = make_ordered(sample(spec, n, rng));
    const double log_est = quantile_classic(s, k, p).log_value;
    stat[r] = scale * (log_est - log_xp - bias);
  });

  NormalitySummary sum;
  sum.replicates = replicates;
  sum.theta = meta.theta;
  sum.mean = mean(stat);
  sum.std_dev = std::sqrt(sample_variance(stat));
  const double theta = meta.theta;
  sum.ks_statistic = ks_statistic(
      stat, [theta](double x) { return std_normal_cdf(x / theta); });
  return sum;
}

}  // namespace weibtail
