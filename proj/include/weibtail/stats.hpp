#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "weibtail/errors.hpp"

namespace weibtail {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw DomainError("mean: empty input");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Median with the even-size convention: midpoint of the two central order
// statistics.
inline double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Unbiased sample variance (n-1 denominator).
inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw DomainError("sample_variance: need at least 2 values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double mean_squared_error(std::span<const double> v, double truth) {
  if (v.empty()) throw DomainError("mean_squared_error: empty input");
  double s = 0.0;
  for (double x : v) s += (x - truth) * (x - truth);
  return s / static_cast<double>(v.size());
}

// Empirical quantile by the inverse-CDF (type 1) rule on a copy.
inline double empirical_quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DomainError("empirical_quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("empirical_quantile: q must lie in [0,1]");
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double h = q * static_cast<double>(n) - 1.0;
  const auto idx = static_cast<std::size_t>(
      std::clamp(std::ceil(h), 0.0, static_cast<double>(n - 1)));
  return v[idx];
}

// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace weibtail
