#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "weibtail/errors.hpp"
#include "weibtail/estimators.hpp"
#include "weibtail/kernel.hpp"
#include "weibtail/ordered_sample.hpp"

namespace weibtail {

enum class EstimatorKind { kClassic, kReduced };

// An extreme quantile estimate. value == exp(log_value) up to one
// rounding; at tau == 1 the value is the anchor order statistic exactly.
struct QuantileEstimate {
  double value = 0.0;
  double log_value = 0.0;
  EstimatorKind kind = EstimatorKind::kClassic;
  double tau = 0.0;
  std::size_t k = 0;
  std::optional<double> rho_used;
  bool extrapolating = false;  // tau > 1; theory covers only this regime
};

// Extrapolation factor tau = log(1/p) / log(n/k). Values <= 1 mean the
// target quantile sits inside the sample range; callers should warn.
inline double tau_of(double p, std::size_t n, std::size_t k) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("tau_of: p must lie in (0,1)");
  }
  if (k < 2 || k + 1 > n) {
    throw DomainError("tau_of: k must lie in [2, n-1], got k=" +
                      std::to_string(k) + " with n=" + std::to_string(n));
  }
  return std::log(1.0 / p) / std::log(static_cast<double>(n) / static_cast<double>(k));
}

namespace detail {

inline QuantileEstimate extrapolate(const OrderedSample& s, std::size_t k,
                                    double p, double theta, double b_hat,
                                    std::optional<double> rho,
                                    EstimatorKind kind) {
  const double tau = tau_of(p, s.size(), k);
  const double anchor = s.upper_order_stat(k);
  double corr = theta * std::log(tau);
  if (rho) corr += b_hat * detail::k_rho_signed(*rho, tau);
  QuantileEstimate est;
  est.value = anchor * std::exp(corr);
  est.log_value = std::log(anchor) + corr;
  est.kind = kind;
  est.tau = tau;
  est.k = k;
  est.rho_used = rho;
  est.extrapolating = tau > 1.0;
  return est;
}

}  // namespace detail

// Classical estimator X_{n-k+1,n} * tau^theta with an injectable
// tail-coefficient estimate.
inline QuantileEstimate quantile_classic(const OrderedSample& s, std::size_t k,
                                         double p, double theta) {
  return detail::extrapolate(s, k, p, theta, 0.0, std::nullopt,
                             EstimatorKind::kClassic);
}

// Default form: theta = theta_tilde(s, k).
inline QuantileEstimate quantile_classic(const OrderedSample& s, std::size_t k,
                                         double p) {
  return quantile_classic(s, k, p, theta_tilde(s, k));
}

// Bias-reduced estimator built from an existing LS fit:
// X_{n-k+1,n} * tau^theta_hat * exp(b_hat K_rho(tau)).
inline QuantileEstimate quantile_reduced_from_fit(const OrderedSample& s,
                                                  const TailFit& fit, double p,
                                                  double rho_plugin = -1.0) {
  if (!(rho_plugin < 0.0) || !std::isfinite(rho_plugin)) {
    throw DomainError("quantile_reduced: rho plug-in must be finite and < 0");
  }
  return detail::extrapolate(s, fit.k, p, fit.theta_hat, fit.b_hat, rho_plugin,
                             EstimatorKind::kReduced);
}

inline QuantileEstimate quantile_reduced(const OrderedSample& s, std::size_t k,
                                         double p, double rho_plugin = -1.0) {
  return quantile_reduced_from_fit(s, ls_fit(s, k), p, rho_plugin);
}

// N-year return level: the level exceeded on average once per
// horizon_years, given n_exceedances observed over years_observed.
struct ReturnLevelQuery {
  double years_observed = 0.0;
  std::size_t n_exceedances = 0;
  double horizon_years = 0.0;
  double threshold = 0.0;  // level defining the exceedances, for reporting
};

// Maps the query onto a tail probability p = years / (count * N) of the
// exceedance distribution.
inline double implied_tail_probability(const ReturnLevelQuery& q) {
  if (!(q.years_observed > 0.0) || q.n_exceedances == 0 ||
      !(q.horizon_years > 0.0)) {
    throw InvalidHorizon("return level: years, count and horizon must be positive");
  }
  const double p = q.years_observed /
                   (static_cast<double>(q.n_exceedances) * q.horizon_years);
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidHorizon("return level: implied tail probability " +
                         std::to_string(p) + " outside (0,1)");
  }
  return p;
}

}  // namespace weibtail
