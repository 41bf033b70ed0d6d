#pragma once

#include <cmath>

#include "weibtail/errors.hpp"

namespace weibtail {

namespace detail {

// Closed form of K_rho for any lambda > 0, signed (negative for
// lambda < 1 and rho < 0). Quantile formulas in the interpolation regime
// use it directly.
inline double k_rho_signed(double rho, double lambda) {
  const double ll = std::log(lambda);
  if (std::abs(rho) < 1e-12) return ll;
  return std::expm1(rho * ll) / rho;
}

}  // namespace detail

// Second-order kernel K_rho(lambda) = integral over [1, lambda] of
// t^(rho-1) dt = (lambda^rho - 1)/rho, continued as log(lambda) at rho = 0.
// Defined on the extrapolation regime lambda >= 1.
inline double k_rho(double rho, double lambda) {
  if (!(lambda >= 1.0) || !std::isfinite(lambda)) {
    throw DomainError("k_rho: lambda must lie in [1, inf)");
  }
  if (!std::isfinite(rho)) {
    throw DomainError("k_rho: rho must be finite");
  }
  return detail::k_rho_signed(rho, lambda);
}

}  // namespace weibtail
