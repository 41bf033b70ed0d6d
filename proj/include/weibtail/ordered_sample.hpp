#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "weibtail/errors.hpp"

namespace weibtail {

// Ascending order statistics X_{1,n} <= ... <= X_{n,n} of a strictly
// positive sample. Immutable once built.
class OrderedSample {
 public:
  std::size_t size() const { return values_.size(); }

  // X_{i,n}, 1-based.
  double order_stat(std::size_t i) const { return values_[i - 1]; }

  // The anchor X_{n-k+1,n} used by the quantile extrapolation.
  double upper_order_stat(std::size_t k) const {
    return values_[values_.size() - k];
  }

  const std::vector<double>& values() const { return values_; }

  friend OrderedSample make_ordered(std::vector<double> raw);

 private:
  explicit OrderedSample(std::vector<double> sorted) : values_(std::move(sorted)) {}

  std::vector<double> values_;
};

// Sorts a raw sample into an OrderedSample. Ties are kept; values must be
// finite and strictly positive, with n >= 3.
inline OrderedSample make_ordered(std::vector<double> raw) {
  if (raw.size() < 3) {
    throw TooSmall("make_ordered: need at least 3 observations, got " +
                   std::to_string(raw.size()));
  }
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw DomainError("make_ordered: sample contains a non-finite value");
    }
    if (!(v > 0.0)) {
      throw NonPositiveValue("make_ordered: sample contains a value <= 0 (" +
                             std::to_string(v) + ")");
    }
  }
  std::sort(raw.begin(), raw.end());
  return OrderedSample(std::move(raw));
}

}  // namespace weibtail
