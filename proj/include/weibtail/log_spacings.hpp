#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "weibtail/errors.hpp"
#include "weibtail/ordered_sample.hpp"

namespace weibtail {

// Rescaled log-spacings of the k upper order statistics,
//   Z_j = j log(n/j) (log X_{n-j+1,n} - log X_{n-j,n}),  j = 1..k.
struct LogSpacings {
  std::vector<double> z;
  std::size_t k = 0;
  std::size_t n = 0;
};

// Regression design x_j = log(n/k) / log(n/j), its mean, and the mean
// squared deviation s_xx = (1/k) sum (x_j - x_bar)^2.
struct DesignPoints {
  std::vector<double> x;
  double x_bar = 0.0;
  double s_xx = 0.0;
};

namespace detail {

inline void check_k_range(std::size_t n, std::size_t k, const char* who) {
  if (k < 2 || k + 1 > n) {
    throw KOutOfRange(std::string(who) + ": k must lie in [2, n-1], got k=" +
                      std::to_string(k) + " with n=" + std::to_string(n));
  }
}

}  // namespace detail

inline LogSpacings log_spacings(const OrderedSample& s, std::size_t k) {
  const std::size_t n = s.size();
  detail::check_k_range(n, k, "log_spacings");
  LogSpacings out;
  out.k = k;
  out.n = n;
  out.z.resize(k);
  for (std::size_t j = 1; j <= k; ++j) {
    const double gap =
        std::log(s.order_stat(n - j + 1)) - std::log(s.order_stat(n - j));
    out.z[j - 1] = static_cast<double>(j) *
                   std::log(static_cast<double>(n) / static_cast<double>(j)) * gap;
  }
  return out;
}

inline DesignPoints design_points(std::size_t n, std::size_t k) {
  detail::check_k_range(n, k, "design_points");
  DesignPoints d;
  d.x.resize(k);
  const double log_nk = std::log(static_cast<double>(n) / static_cast<double>(k));
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    // j == k divides log(n/k) by itself, so x_k == 1 exactly
    d.x[j - 1] = log_nk / std::log(static_cast<double>(n) / static_cast<double>(j));
    sum += d.x[j - 1];
  }
  d.x_bar = sum / static_cast<double>(k);
  double ss = 0.0;
  for (double xj : d.x) {
    const double c = xj - d.x_bar;
    ss += c * c;
  }
  d.s_xx = ss / static_cast<double>(k);
  if (!(d.s_xx > 0.0)) {
    throw DegenerateDesign("design_points: zero design variance");
  }
  return d;
}

}  // namespace weibtail
