#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weibtail/distributions.hpp"
#include "weibtail/errors.hpp"
#include "weibtail/estimators.hpp"
#include "weibtail/kernel.hpp"
#include "weibtail/quantile.hpp"

namespace weibtail {

enum class AmseKind { kTrue, kEstimated };

struct AmseCurve {
  std::vector<std::size_t> k_values;
  std::vector<double> amse;
  AmseKind kind = AmseKind::kEstimated;
};

struct SelectionResult {
  std::size_t k_hat = 0;
  AmseCurve curve;
  bool tie_policy_applied = false;
};

namespace detail {

// sum over j = 1..k of (log(n/j) / log(n/k))^rho
inline double design_power_sum(std::size_t n, std::size_t k, double rho) {
  const double log_nk = std::log(static_cast<double>(n) / static_cast<double>(k));
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    sum += std::pow(
        std::log(static_cast<double>(n) / static_cast<double>(j)) / log_nk, rho);
  }
  return sum;
}

}  // namespace detail

// Adapted asymptotic MSE of the classical log-quantile estimator at the
// true (theta, rho, b):
//   theta^2 log^2(tau)/k
//   + b^2(log(n/k)) { (log(tau)/k) sum_j (log(n/j)/log(n/k))^rho - K_rho(tau) }^2.
// The second term drops when b vanishes (Weibull row, rho = -inf).
inline double amse_true(const TailMeta& meta, std::size_t n, std::size_t k,
                        double p) {
  const double tau = tau_of(p, n, k);
  const double lt = std::log(tau);
  const double variance_term =
      meta.theta * meta.theta * lt * lt / static_cast<double>(k);
  const double bval = meta.b(std::log(static_cast<double>(n) / static_cast<double>(k)));
  if (bval == 0.0) return variance_term;
  if (!std::isfinite(meta.rho)) {
    throw DomainError("amse_true: nonzero bias with infinite rho");
  }
  const double bracket =
      lt * detail::design_power_sum(n, k, meta.rho) / static_cast<double>(k) -
      detail::k_rho_signed(meta.rho, tau);
  return variance_term + bval * bval * bracket * bracket;
}

// Plug-in estimate of the AMSE* with the canonical rho = -1, for which the
// kernel term reduces to tau^{-1} - 1:
//   theta_hat^2 log^2(tau)/k
//   + b_hat^2 { (log(tau)/k) sum_j (log(n/j)/log(n/k))^{-1} + tau^{-1} - 1 }^2.
inline double amse_estimated(const LogSpacings& z, std::size_t k, double p) {
  const TailFit fit = ls_fit(z, k);
  const double tau = tau_of(p, z.n, k);
  const double lt = std::log(tau);
  const double variance_term =
      fit.theta_hat * fit.theta_hat * lt * lt / static_cast<double>(k);
  const double bracket =
      lt * detail::design_power_sum(z.n, k, -1.0) / static_cast<double>(k) +
      1.0 / tau - 1.0;
  return variance_term + fit.b_hat * fit.b_hat * bracket * bracket;
}

inline double amse_estimated(const OrderedSample& s, std::size_t k, double p) {
  return amse_estimated(log_spacings(s, k), k, p);
}

namespace detail {

template <typename AmseFn>
SelectionResult argmin_curve(std::span<const std::size_t> grid, AmseKind kind,
                             AmseFn&& amse_at) {
  if (grid.empty()) throw EmptyGrid("select_k: empty k grid");
  SelectionResult res;
  res.curve.kind = kind;
  res.curve.k_values.assign(grid.begin(), grid.end());
  res.curve.amse.reserve(grid.size());
  for (std::size_t k : grid) res.curve.amse.push_back(amse_at(k));

  std::size_t best = 0;
  for (std::size_t i = 1; i < res.curve.amse.size(); ++i) {
    if (res.curve.amse[i] < res.curve.amse[best]) best = i;
  }
  res.k_hat = res.curve.k_values[best];
  for (std::size_t i = best + 1; i < res.curve.amse.size(); ++i) {
    if (res.curve.amse[i] == res.curve.amse[best]) {
      res.tie_policy_applied = true;
      break;
    }
  }
  return res;
}

inline std::vector<std::size_t> k_range(std::size_t k_min, std::size_t k_max,
                                        std::size_t n, const char* who) {
  if (k_min < 2 || k_max + 1 > n) {
    throw KOutOfRange(std::string(who) + ": grid must lie inside [2, n-1]");
  }
  if (k_min > k_max) {
    throw EmptyGrid(std::string(who) + ": k_min > k_max");
  }
  std::vector<std::size_t> grid;
  grid.reserve(k_max - k_min + 1);
  for (std::size_t k = k_min; k <= k_max; ++k) grid.push_back(k);
  return grid;
}

}  // namespace detail

// Adaptive choice of k: argmin of the estimated AMSE* over the grid, ties
// broken toward the smallest k.
inline SelectionResult select_k(const OrderedSample& s, double p,
                                std::size_t k_min, std::size_t k_max) {
  const auto grid = detail::k_range(k_min, k_max, s.size(), "select_k");
  const LogSpacings z = log_spacings(s, k_max);
  return detail::argmin_curve(grid, AmseKind::kEstimated, [&](std::size_t k) {
    return amse_estimated(z, k, p);
  });
}

// Oracle counterpart: argmin of the true AMSE*.
inline SelectionResult k_opt_true(const TailMeta& meta, std::size_t n, double p,
                                  std::size_t k_min, std::size_t k_max) {
  const auto grid = detail::k_range(k_min, k_max, n, "k_opt_true");
  return detail::argmin_curve(grid, AmseKind::kTrue, [&](std::size_t k) {
    return amse_true(meta, n, k, p);
  });
}

// Remark-1 deterministic sequence k_n = (lambda log n / b(log n))^2,
// unrounded; the caller clamps into [2, n-1].
inline double remark1_k(const TailMeta& meta, std::size_t n, double lambda) {
  const double bn = meta.b(std::log(static_cast<double>(n)));
  if (bn == 0.0) {
    throw ZeroBias("remark1_k: bias function vanishes at log n");
  }
  const double r = lambda * std::log(static_cast<double>(n)) / bn;
  return r * r;
}

// Default search grid [max(2, ceil(0.02 n)), min(floor(0.9 n), n-1)].
inline std::pair<std::size_t, std::size_t> default_k_range(std::size_t n) {
  const auto lo = std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::ceil(0.02 * static_cast<double>(n))));
  const auto hi = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n))), n - 1);
  return {lo, hi};
}

struct ReturnLevelResult {
  QuantileEstimate estimate;
  double implied_p = 0.0;
  bool auto_selected = false;
};

// Return-level workflow on an exceedance sample: maps the horizon onto a
// tail probability, picks k (fixed or adaptive), and delegates to the
// chosen quantile estimator.
inline ReturnLevelResult return_level(const OrderedSample& s,
                                      const ReturnLevelQuery& q,
                                      std::optional<std::size_t> k,
                                      EstimatorKind kind,
                                      double rho_plugin = -1.0) {
  const double p = implied_tail_probability(q);
  ReturnLevelResult res;
  res.implied_p = p;
  std::size_t kk;
  if (k) {
    kk = *k;
  } else {
    const auto [lo, hi] = default_k_range(s.size());
    kk = select_k(s, p, lo, hi).k_hat;
    res.auto_selected = true;
  }
  res.estimate = (kind == EstimatorKind::kClassic)
                     ? quantile_classic(s, kk, p)
                     : quantile_reduced(s, kk, p, rho_plugin);
  return res;
}

}  // namespace weibtail
