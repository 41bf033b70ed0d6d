#pragma once

#include <cstddef>
#include <numeric>
#include <string>

#include "weibtail/errors.hpp"
#include "weibtail/log_spacings.hpp"
#include "weibtail/ordered_sample.hpp"

namespace weibtail {

// Joint tail-coefficient estimate at a given k. theta_tilde is the
// log-spacings mean; (theta_hat, b_hat) is the least-squares fit of
// Z_j on the design x_j, so theta_hat = mean(Z) - b_hat * x_bar.
struct TailFit {
  double theta_tilde = 0.0;
  double theta_hat = 0.0;
  double b_hat = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
};

namespace detail {

inline void check_prefix(const LogSpacings& z, std::size_t k, const char* who) {
  if (k < 2 || k > z.k) {
    throw KOutOfRange(std::string(who) + ": k must lie in [2, " +
                      std::to_string(z.k) + "], got " + std::to_string(k));
  }
}

}  // namespace detail

// Mean of the first k log-spacings.
inline double theta_tilde(const LogSpacings& z, std::size_t k) {
  detail::check_prefix(z, k, "theta_tilde");
  const double sum = std::accumulate(z.z.begin(), z.z.begin() + k, 0.0);
  return sum / static_cast<double>(k);
}

inline double theta_tilde(const OrderedSample& s, std::size_t k) {
  return theta_tilde(log_spacings(s, k), k);
}

// Least-squares fit of the first k spacings on the design points.
inline TailFit ls_fit(const LogSpacings& z, std::size_t k) {
  detail::check_prefix(z, k, "ls_fit");
  const DesignPoints d = design_points(z.n, k);
  double z_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) z_sum += z.z[j];
  const double z_bar = z_sum / static_cast<double>(k);

  double sxz = 0.0;
  double sxx = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double dx = d.x[j] - d.x_bar;
    sxz += dx * z.z[j];
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) {
    throw DegenerateDesign("ls_fit: zero design variance");
  }

  TailFit fit;
  fit.k = k;
  fit.n = z.n;
  fit.theta_tilde = z_bar;
  fit.b_hat = sxz / sxx;
  fit.theta_hat = z_bar - fit.b_hat * d.x_bar;
  return fit;
}

inline TailFit ls_fit(const LogSpacings& z) { return ls_fit(z, z.k); }

inline TailFit ls_fit(const OrderedSample& s, std::size_t k) {
  return ls_fit(log_spacings(s, k));
}

}  // namespace weibtail
