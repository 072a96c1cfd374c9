#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qia/bits.hpp"
#include "qia/rng.hpp"

namespace qia {

/// Affine Toeplitz hash h(x) = T x + c over GF(2), from N input bits to 2d output bits.
///
/// T is the 2d x N Toeplitz matrix with T[i][j] = diag[i - j + N - 1], where `diag`
/// has N + 2d - 1 bits. Both `diag` and the offset `c` are expanded from `seed`, so
/// the triple (seed, N, d) is a complete public description of the function.
class HashFunction {
 public:
  static HashFunction from_seed(std::uint64_t seed, std::size_t in_len, std::size_t d);

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t in_len() const noexcept { return in_len_; }
  std::size_t d() const noexcept { return d_; }
  std::size_t out_len() const noexcept { return 2 * d_; }

  const BitString& diagonals() const noexcept { return diag_; }
  const BitString& offset() const noexcept { return offset_; }
  bool matrix_entry(std::size_t row, std::size_t col) const;

  BitString eval(const BitString& input) const;
  /// Word-packed evaluation (layout of BitString::to_words) for hot loops.
  std::vector<std::uint64_t> eval_words(std::span<const std::uint64_t> input) const;
  /// Column `col` of T, word-packed over the output bits.
  std::vector<std::uint64_t> column_words(std::size_t col) const;
  std::vector<std::uint64_t> offset_words() const { return offset_.to_words(); }

  bool operator==(const HashFunction& other) const noexcept {
    return seed_ == other.seed_ && in_len_ == other.in_len_ && d_ == other.d_;
  }

 private:
  HashFunction() = default;

  std::uint64_t seed_ = 0;
  std::size_t in_len_ = 0;
  std::size_t d_ = 0;
  BitString diag_;
  BitString offset_;
  std::vector<std::uint64_t> rows_;  // out_len rows of in_words_ words each
  std::size_t in_words_ = 0;
};

struct Nonce {
  BitString bits;
  bool operator==(const Nonce&) const = default;
};

/// Fills `length` bits from successive 64-bit draws, low bit first.
BitString random_bits(Rng& rng, std::size_t length);

HashFunction sample_hash(Rng& rng, std::size_t in_len, std::size_t d);
Nonce sample_nonce(Rng& rng, std::size_t length);

}  // namespace qia
