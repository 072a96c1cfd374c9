#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace qia {

/// Counter-based SplitMix64 generator.
///
/// Output n (0-based) of a stream with key `seed` is mix64(seed + (n + 1) * 0x9E3779B97F4A7C15),
/// where mix64 is the SplitMix64 finalizer. Child streams are keyed by
/// mix64(seed ^ mix64(label_hash)), where string labels are hashed with 64-bit FNV-1a
/// and integer labels are used as-is. The construction is fixed; reports that echo a seed
/// reproduce exactly on any platform.
///
/// Satisfies UniformRandomBitGenerator, but protocol code uses the member draws below
/// so results do not depend on the standard library's distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  bool next_bit() noexcept { return (next_u64() >> 63) != 0; }
  /// Uniform in [0, 1) with 53 bits of precision.
  double next_unit() noexcept;
  bool bernoulli(double p) noexcept { return next_unit() < p; }
  /// Uniform in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) noexcept;

  Rng stream(std::string_view label) const noexcept;
  Rng stream(std::uint64_t index) const noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace qia
