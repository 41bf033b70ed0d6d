#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "weibtail/errors.hpp"

namespace weibtail {

namespace detail {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;

// Acklam's rational approximation to the standard normal quantile,
// ~1.15e-9 relative before polishing.
inline double normal_quantile_seed(double q) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (q < plow) {
    const double t = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
           ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  if (q > 1.0 - plow) {
    const double t = std::sqrt(-2.0 * std::log1p(-q));
    return -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
           ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  const double u = q - 0.5;
  const double t = u * u;
  return u * (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) /
         (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
}

}  // namespace detail

// Standard normal CDF.
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / detail::kSqrt2);
}

// Standard normal quantile, polished to near machine precision by one
// Halley step on erfc. The polish is skipped past |x| ~ 37 where
// exp(x^2/2) overflows.
inline double std_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("std_normal_quantile: q must lie in (0,1)");
  }
  double x = detail::normal_quantile_seed(q);
  if (std::abs(x) < 37.0) {
    const double err = std_normal_cdf(x) - q;
    const double u = err * detail::kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace detail {

// Lower regularized incomplete gamma by power series; valid for x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by Lentz continued fraction; valid
// for x >= a+1.
inline double gamma_q_contfrac(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline void check_gamma_args(double a, double x, const char* who) {
  if (!(a > 0.0) || !std::isfinite(a) || !(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(who) + ": requires a > 0 and x >= 0");
  }
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
  detail::check_gamma_args(a, x, "regularized_gamma_p");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed on
// whichever branch keeps the small quantity accurate.
inline double regularized_gamma_q(double a, double x) {
  detail::check_gamma_args(a, x, "regularized_gamma_q");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_contfrac(a, x);
}

namespace detail {

// Gamma density without the 1/Gamma(a) normalization already folded in:
// d/dx P(a,x) = exp(-x + (a-1) log x - lgamma(a)).
inline double gamma_p_derivative(double a, double x) {
  return std::exp(-x + (a - 1.0) * std::log(x) - std::lgamma(a));
}

// Initial guess for P(a, x) = p: Wilson-Hilferty for a > 1, the standard
// small-shape switch otherwise.
inline double gamma_inverse_seed(double a, double p) {
  if (a > 1.0) {
    const double z = std_normal_quantile(p);
    const double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
    const double x = a * t * t * t;
    if (x > 0.0 && std::isfinite(x)) return x;
    return a;  // WH cube went nonpositive far in the tail
  }
  const double t = 1.0 - a * (0.253 + a * 0.12);
  if (p < t) return std::pow(p / t, 1.0 / a);
  return 1.0 - std::log1p(-(p - t) / (1.0 - t));
}

// Bracketed Newton for target(x) = goal, with target = P (dsign +1) or
// Q (dsign -1). Relative tolerance 1e-12 on x.
template <typename F>
double gamma_invert(F&& target, double goal, int dsign, double a, double x0) {
  // g is increasing in both cases, with g' = gamma density.
  auto g = [&](double x) {
    const double t = target(x);
    return dsign > 0 ? t - goal : goal - t;
  };
  double lo = 0.0;
  double hi = std::max({2.0 * x0, a + 10.0, 1.0});
  for (int i = 0; i < 100 && g(hi) < 0.0; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (gx >= 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double fp = gamma_p_derivative(a, x);
    double next = (fp > 0.0 && std::isfinite(fp)) ? x - gx / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double dx = std::abs(next - x);
    x = next;
    if (dx <= 1e-12 * std::abs(x) + 1e-300) break;
  }
  return x;
}

}  // namespace detail

// Inverse of P(a, .): returns x with P(a, x) = p.
inline double regularized_gamma_p_inverse(double a, double p) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("regularized_gamma_p_inverse: a must be > 0");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("regularized_gamma_p_inverse: p must lie in (0,1)");
  }
  const double x0 = detail::gamma_inverse_seed(a, p);
  return detail::gamma_invert([a](double x) { return regularized_gamma_p(a, x); },
                              p, +1, a, x0);
}

// Inverse of Q(a, .): returns x with Q(a, x) = q. Accurate deep in the
// upper tail, where 1 - q would wash out.
inline double regularized_gamma_q_inverse(double a, double q) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("regularized_gamma_q_inverse: a must be > 0");
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("regularized_gamma_q_inverse: q must lie in (0,1)");
  }
  const double x0 = detail::gamma_inverse_seed(a, 1.0 - q);
  return detail::gamma_invert([a](double x) { return regularized_gamma_q(a, x); },
                              q, -1, a, x0);
}

}  // namespace weibtail
