#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "weibtail/errors.hpp"
#include "weibtail/rng.hpp"
#include "weibtail/special_functions.hpp"

namespace weibtail {

enum class Family { kAbsNormal, kGamma, kWeibull, kDClass };

// A simulable law from the study: |N(0,1)|, Gamma(shape, rate),
// Weibull(shape, scale) with 1-F(x) = exp(-(x/scale)^shape), or the
// D(alpha, beta) class with H^{-1}(t) = t^{1/alpha} (1 + t^{-beta}).
struct DistributionSpec {
  Family family = Family::kAbsNormal;
  double a = 0.0;  // shape (gamma, weibull) or alpha (d_class)
  double b = 0.0;  // rate (gamma), scale (weibull) or beta (d_class)
};

inline DistributionSpec abs_normal() { return {Family::kAbsNormal, 0.0, 0.0}; }

inline DistributionSpec gamma_law(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("gamma_law: shape and rate must be > 0");
  }
  return {Family::kGamma, shape, rate};
}

inline DistributionSpec weibull_law(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw DomainError("weibull_law: shape and scale must be > 0");
  }
  return {Family::kWeibull, shape, scale};
}

inline DistributionSpec d_class(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0 && beta < 1.0) || !(alpha * beta <= 1.0)) {
    throw DomainError("d_class: requires alpha > 0, 0 < beta < 1, alpha*beta <= 1");
  }
  return {Family::kDClass, alpha, beta};
}

// Tail metadata (theta, rho, b, ell): the true second-order ingredients of
// each law. rho is -infinity when the bias function vanishes identically.
struct TailMeta {
  double theta = 0.0;
  double rho = 0.0;
  std::function<double(double)> b;
  std::function<double(double)> ell;  // empty when no closed form is carried
  bool exponential_fallback = false;  // gamma shape == 1 routed to the Weibull row
};

inline TailMeta tail_meta(const DistributionSpec& spec) {
  TailMeta m;
  switch (spec.family) {
    case Family::kAbsNormal:
      m.theta = 0.5;
      m.rho = -1.0;
      m.b = [](double x) { return 0.25 * std::log(x) / x; };
      return m;
    case Family::kGamma: {
      if (spec.a == 1.0) {
        // Gamma(1, rate) is the exponential: the Weibull row applies
        const double scale = 1.0 / spec.b;
        m.theta = 1.0;
        m.rho = -std::numeric_limits<double>::infinity();
        m.b = [](double) { return 0.0; };
        m.ell = [scale](double) { return scale; };
        m.exponential_fallback = true;
        return m;
      }
      const double shape = spec.a;
      m.theta = 1.0;
      m.rho = -1.0;
      m.b = [shape](double x) { return (1.0 - shape) * std::log(x) / x; };
      return m;
    }
    case Family::kWeibull: {
      const double scale = spec.b;
      m.theta = 1.0 / spec.a;
      m.rho = -std::numeric_limits<double>::infinity();
      m.b = [](double) { return 0.0; };
      m.ell = [scale](double) { return scale; };
      return m;
    }
    case Family::kDClass: {
      const double beta = spec.b;
      m.theta = 1.0 / spec.a;
      m.rho = -beta;
      m.b = [beta](double x) { return -beta * std::pow(x, -beta); };
      m.ell = [beta](double x) { return 1.0 + std::pow(x, -beta); };
      return m;
    }
  }
  throw DomainError("tail_meta: unknown family");
}

namespace detail {

// Inverts H^{-1}(u) = u^{1/alpha} (1 + u^{-beta}) = x for the D class.
// The map is strictly increasing because alpha*beta <= 1.
inline double dclass_h(double alpha, double beta, double x) {
  const double lower = (alpha * beta == 1.0) ? 1.0 : 0.0;
  if (x <= lower) return 0.0;
  auto g = [&](double u) {
    return std::pow(u, 1.0 / alpha) * (1.0 + std::pow(u, -beta));
  };
  double hi = std::pow(x, alpha);  // g(u) >= u^{1/alpha}
  double lo = hi;
  for (int i = 0; i < 2000 && g(lo) > x; ++i) lo *= 0.5;
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gu = g(u);
    if (gu >= x) {
      hi = u;
    } else {
      lo = u;
    }
    const double dg = std::pow(u, 1.0 / alpha - 1.0) *
                      (1.0 / alpha + (1.0 / alpha - beta) * std::pow(u, -beta));
    double next = (dg > 0.0 && std::isfinite(dg)) ? u - (gu - x) / dg
                                                  : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double du = std::abs(next - u);
    u = next;
    if (du <= 1e-13 * std::abs(u) + 1e-300) break;
  }
  return u;
}

}  // namespace detail

// True upper quantile x_p with 1 - F(x_p) = p.
inline double true_quantile(const DistributionSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("true_quantile: p must lie in (0,1)");
  }
  const double t = -std::log(p);
  switch (spec.family) {
    case Family::kAbsNormal:
      return -std_normal_quantile(0.5 * p);
    case Family::kGamma:
      return regularized_gamma_q_inverse(spec.a, p) / spec.b;
    case Family::kWeibull:
      return spec.b * std::pow(t, 1.0 / spec.a);
    case Family::kDClass:
      return std::pow(t, 1.0 / spec.a) * (1.0 + std::pow(t, -spec.b));
  }
  throw DomainError("true_quantile: unknown family");
}

// Distribution function F(x).
inline double cdf(const DistributionSpec& spec, double x) {
  if (x <= 0.0) return 0.0;
  switch (spec.family) {
    case Family::kAbsNormal:
      return std::erf(x / detail::kSqrt2);
    case Family::kGamma:
      return regularized_gamma_p(spec.a, spec.b * x);
    case Family::kWeibull:
      return -std::expm1(-std::pow(x / spec.b, spec.a));
    case Family::kDClass:
      return -std::expm1(-detail::dclass_h(spec.a, spec.b, x));
  }
  throw DomainError("cdf: unknown family");
}

// n i.i.d. draws by inverse transform, one uniform per draw.
inline std::vector<double> sample(const DistributionSpec& spec, std::size_t n,
                                  Rng& rng) {
  std::vector<double> out(n);
  switch (spec.family) {
    case Family::kAbsNormal:
      for (auto& v : out) v = std_normal_quantile(0.5 + 0.5 * rng.next_unit());
      break;
    case Family::kGamma:
      for (auto& v : out) {
        v = regularized_gamma_p_inverse(spec.a, rng.next_unit()) / spec.b;
      }
      break;
    case Family::kWeibull:
      for (auto& v : out) {
        v = spec.b * std::pow(rng.next_exponential(), 1.0 / spec.a);
      }
      break;
    case Family::kDClass:
      for (auto& v : out) {
        const double e = rng.next_exponential();
        v = std::pow(e, 1.0 / spec.a) * (1.0 + std::pow(e, -spec.b));
      }
      break;
  }
  return out;
}

namespace detail {

// Locale-independent full-token double parse.
inline double parse_double_strict(std::string_view text, const char* who) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw DomainError(std::string(who) + ": cannot parse number '" +
                      std::string(text) + "'");
  }
  return v;
}

}  // namespace detail

// Parses "absnormal", "gamma:0.25,0.25", "weibull:0.25,0.25" or
// "dclass:1,0.5".
inline DistributionSpec parse_distribution(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      params.push_back(detail::parse_double_strict(
          rest.substr(0, comma), "parse_distribution"));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  auto need = [&](std::size_t count) {
    if (params.size() != count) {
      throw DomainError("parse_distribution: '" + std::string(text) +
                        "' expects " + std::to_string(count) + " parameters");
    }
  };
  if (name == "absnormal") {
    need(0);
    return abs_normal();
  }
  if (name == "gamma") {
    need(2);
    return gamma_law(params[0], params[1]);
  }
  if (name == "weibull") {
    need(2);
    return weibull_law(params[0], params[1]);
  }
  if (name == "dclass") {
    need(2);
    return d_class(params[0], params[1]);
  }
  throw DomainError("parse_distribution: unknown family '" + std::string(name) +
                    "' (expected absnormal|gamma|weibull|dclass)");
}

}  // namespace weibtail
