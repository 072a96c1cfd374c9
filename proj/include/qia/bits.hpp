#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qia {

/// Fixed-length bit string, indexed from 0 at the most significant (leftmost) end.
///
/// Hex and byte forms pack the bits MSB-first; a trailing partial nibble or byte is
/// padded with zero bits on the right.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length) : bits_(length, 0) {}

  static BitString from_string(std::string_view binary);
  static BitString from_uint(std::uint64_t value, std::size_t length);
  static BitString from_hex(std::string_view hex, std::size_t length);
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t length);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  /// Big-endian value of the string; requires size() <= 64.
  std::uint64_t to_uint() const;
  std::string to_string() const;
  std::string to_hex() const;
  std::vector<std::uint8_t> to_bytes() const;
  /// Packs into 64-bit words: bit i lands in word i / 64 at position i % 64.
  std::vector<std::uint64_t> to_words() const;

  BitString operator+(const BitString& tail) const;
  BitString operator^(const BitString& other) const;
  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

std::string to_hex_digits(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex_digits(std::string_view hex);

}  // namespace qia
