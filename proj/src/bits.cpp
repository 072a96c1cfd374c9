#include "qia/bits.hpp"

#include "qia/errors.hpp"

namespace qia {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitString BitString::from_string(std::string_view binary) {
  BitString out(binary.size());
  for (std::size_t i = 0; i < binary.size(); ++i) {
    if (binary[i] != '0' && binary[i] != '1') {
      throw InputError("bit string may only contain '0' and '1'");
    }
    out.bits_[i] = binary[i] == '1';
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t length) {
  if (length > 64) throw InputError("from_uint supports at most 64 bits");
  if (length < 64 && (value >> length) != 0) {
    throw InputError("value does not fit in the requested bit length");
  }
  BitString out(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.bits_[i] = (value >> (length - 1 - i)) & 1U;
  }
  return out;
}

BitString BitString::from_hex(std::string_view hex, std::size_t length) {
  if (hex.size() != (length + 3) / 4) {
    throw InputError("hex string has " + std::to_string(hex.size()) + " digits, expected " +
                     std::to_string((length + 3) / 4));
  }
  BitString out(length);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const int v = hex_value(hex[d]);
    if (v < 0) throw InputError("invalid hex digit");
    for (int b = 0; b < 4; ++b) {
      const std::size_t i = d * 4 + static_cast<std::size_t>(b);
      const bool bit = (v >> (3 - b)) & 1;
      if (i < length) {
        out.bits_[i] = bit;
      } else if (bit) {
        throw InputError("nonzero padding bits in hex string");
      }
    }
  }
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t length) {
  if (bytes.size() != (length + 7) / 8) throw InputError("byte count does not match bit length");
  BitString out(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.bits_[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
  }
  return out;
}

bool BitString::at(std::size_t i) const {
  if (i >= bits_.size()) throw InputError("bit index out of range");
  return bits_[i] != 0;
}

std::uint64_t BitString::to_uint() const {
  if (bits_.size() > 64) throw InputError("to_uint supports at most 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string BitString::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s((bits_.size() + 3) / 4, '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) {
      const int v = hex_value(s[i / 4]) | (1 << (3 - i % 4));
      s[i / 4] = kDigits[v];
    }
  }
  return s;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

std::vector<std::uint64_t> BitString::to_words() const {
  std::vector<std::uint64_t> out((bits_.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return out;
}

BitString BitString::operator+(const BitString& tail) const {
  BitString out = *this;
  out.bits_.insert(out.bits_.end(), tail.bits_.begin(), tail.bits_.end());
  return out;
}

BitString BitString::operator^(const BitString& other) const {
  if (other.size() != size()) throw InputError("xor of bit strings with different lengths");
  BitString out(size());
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ^ other.bits_[i];
  return out;
}

std::string to_hex_digits(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

std::vector<std::uint8_t> from_hex_digits(std::string_view hex) {
  if (hex.size() % 2 != 0) throw InputError("hex byte string must have an even digit count");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw InputError("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

}  // namespace qia
