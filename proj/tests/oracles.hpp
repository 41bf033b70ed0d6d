// Independent reference implementations used only by the test suites.
// Nothing here may call into the library code paths it is checking.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

// Simple linear regression of z on x solved through the raw normal
// equations (Cramer's rule), a different arithmetic route than the
// centered covariance form.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

inline LineFit normal_equations(std::span<const double> x,
                                std::span<const double> z) {
  if (x.size() != z.size() || x.size() < 2) {
    throw std::invalid_argument("normal_equations: bad input");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sxx = 0.0, sz = 0.0, sxz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sxx += x[i] * x[i];
    sz += z[i];
    sxz += x[i] * z[i];
  }
  const double det = n * sxx - sx * sx;
  LineFit fit;
  fit.slope = (n * sxz - sx * sz) / det;
  fit.intercept = (sz * sxx - sx * sxz) / det;
  return fit;
}

// erf by Maclaurin series; fine for |x| <= 3.
inline double erf_series(double x) {
  const double two_over_sqrt_pi = 1.1283791670955125739;
  double term = x;
  double sum = x;
  const double x2 = x * x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / static_cast<double>(n);
    const double add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return two_over_sqrt_pi * sum;
}

// erfc by the Legendre continued fraction (modified Lentz); for x >= 3:
//   erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
inline double erfc_contfrac(double x) {
  const double inv_sqrt_pi = 0.56418958354775628695;
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 400; ++n) {
    const double an = (n == 1) ? 1.0 : 0.5 * static_cast<double>(n - 1);
    d = x + an * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x * x) * inv_sqrt_pi * f;
}

inline double normal_cdf(double x) {
  const double sqrt2 = 1.4142135623730950488;
  const double t = x / sqrt2;
  if (t >= 3.0) return 1.0 - 0.5 * erfc_contfrac(t);
  if (t <= -3.0) return 0.5 * erfc_contfrac(-t);
  return 0.5 * (1.0 + erf_series(t));
}

// Inverts normal_cdf by bisection, independent of the library quantile.
inline double normal_quantile_bisect(double q) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail {

template <typename F>
double simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Regularized lower incomplete gamma by quadrature. For a < 1 the
// substitution u = t^a removes the endpoint singularity:
//   P(a, x) = (1 / (a Gamma(a))) * integral_0^{x^a} exp(-u^{1/a}) du.
inline double gamma_p_quadrature(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (a >= 1.0) {
    auto f = [a](double t) {
      return t == 0.0 ? 0.0 : std::exp((a - 1.0) * std::log(t) - t);
    };
    return adaptive_simpson(f, 0.0, x) / std::tgamma(a);
  }
  const double inv_a = 1.0 / a;
  auto f = [inv_a](double u) {
    return u == 0.0 ? 1.0 : std::exp(-std::pow(u, inv_a));
  };
  return adaptive_simpson(f, 0.0, std::pow(x, a)) / (a * std::tgamma(a));
}

}  // namespace oracles
