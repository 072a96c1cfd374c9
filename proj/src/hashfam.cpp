#include "qia/hashfam.hpp"

#include <bit>
#include <string>

#include "qia/errors.hpp"

namespace qia {

BitString random_bits(Rng& rng, std::size_t length) {
  BitString out(length);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < length; ++i) {
    if (i % 64 == 0) word = rng.next_u64();
    out.set(i, (word >> (i % 64)) & 1U);
  }
  return out;
}

HashFunction HashFunction::from_seed(std::uint64_t seed, std::size_t in_len, std::size_t d) {
  if (in_len == 0) throw InputError("hash input length must be at least 1");
  if (d == 0) throw InputError("hash output must cover at least one pair (d >= 1)");

  HashFunction h;
  h.seed_ = seed;
  h.in_len_ = in_len;
  h.d_ = d;
  Rng rng(seed);
  h.diag_ = random_bits(rng, in_len + 2 * d - 1);
  h.offset_ = random_bits(rng, 2 * d);

  h.in_words_ = (in_len + 63) / 64;
  h.rows_.assign(h.out_len() * h.in_words_, 0);
  for (std::size_t i = 0; i < h.out_len(); ++i) {
    for (std::size_t j = 0; j < in_len; ++j) {
      if (h.diag_[i + in_len - 1 - j]) {
        h.rows_[i * h.in_words_ + j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }
  return h;
}

bool HashFunction::matrix_entry(std::size_t row, std::size_t col) const {
  if (row >= out_len() || col >= in_len_) throw InputError("matrix index out of range");
  return diag_[row + in_len_ - 1 - col];
}

std::vector<std::uint64_t> HashFunction::eval_words(std::span<const std::uint64_t> input) const {
  if (input.size() != in_words_) throw InputError("packed input has the wrong word count");
  const auto offset = offset_.to_words();
  std::vector<std::uint64_t> out(offset);
  for (std::size_t i = 0; i < out_len(); ++i) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < in_words_; ++w) acc ^= rows_[i * in_words_ + w] & input[w];
    if (std::popcount(acc) & 1) out[i / 64] ^= std::uint64_t{1} << (i % 64);
  }
  return out;
}

BitString HashFunction::eval(const BitString& input) const {
  if (input.size() != in_len_) {
    throw InputError("hash input has " + std::to_string(input.size()) + " bits, expected " +
                     std::to_string(in_len_));
  }
  const auto words = eval_words(input.to_words());
  BitString out(out_len());
  for (std::size_t i = 0; i < out_len(); ++i) out.set(i, (words[i / 64] >> (i % 64)) & 1U);
  return out;
}

std::vector<std::uint64_t> HashFunction::column_words(std::size_t col) const {
  if (col >= in_len_) throw InputError("column index out of range");
  std::vector<std::uint64_t> out((out_len() + 63) / 64, 0);
  for (std::size_t i = 0; i < out_len(); ++i) {
    if (diag_[i + in_len_ - 1 - col]) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return out;
}

HashFunction sample_hash(Rng& rng, std::size_t in_len, std::size_t d) {
  return HashFunction::from_seed(rng.next_u64(), in_len, d);
}

Nonce sample_nonce(Rng& rng, std::size_t length) {
  if (length == 0) throw InputError("nonce length must be at least 1");
  return Nonce{random_bits(rng, length)};
}

}  // namespace qia
