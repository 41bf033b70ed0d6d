#pragma once

#include <cmath>
#include <cstdint>

namespace weibtail {

// Counter-based uniform generator (splitmix64 finalizer over a Weyl
// sequence). Output depends only on (seed, stream, counter), so replicates
// seeded with distinct streams draw identical values no matter how work is
// scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + kGolden * (stream + 1))) {}

  std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

  // Uniform draw strictly inside (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard exponential draw via inverse transform.
  double next_exponential() { return -std::log(next_unit()); }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace weibtail
