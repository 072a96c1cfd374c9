#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qia/protocol.hpp"

namespace qia {

inline constexpr std::size_t kDefaultKeylenCap = 24;

/// Exhaustive-enumeration cap: QIA_KEYLEN_CAP if set, otherwise 24.
std::size_t keylen_cap();

/// Fixed-size bitset over candidate indices.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::uint64_t bits, bool value = false);

  std::uint64_t size() const noexcept { return size_; }
  bool test(std::uint64_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::uint64_t i) noexcept { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::uint64_t i) noexcept { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  std::uint64_t count() const noexcept;
  Bitset& operator&=(const Bitset& other);
  Bitset& operator|=(const Bitset& other);
  bool operator==(const Bitset&) const = default;

  std::vector<std::uint64_t>& words() noexcept { return words_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

 private:
  void clear_tail() noexcept;

  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// The candidate key space K. Keys are handled as their big-endian integer value.
class KeySpace {
 public:
  enum class Kind { Exhaustive, ExplicitList };

  static KeySpace exhaustive(std::size_t key_len);
  /// Keys keep the given order; duplicates or out-of-range values throw InputError.
  static KeySpace explicit_list(std::size_t key_len, std::vector<std::uint64_t> keys);

  Kind kind() const noexcept { return kind_; }
  std::size_t key_len() const noexcept { return key_len_; }
  std::uint64_t size() const noexcept;

  /// Candidate at enumeration position `index`.
  std::uint64_t key_at(std::uint64_t index) const;
  /// Enumeration position of `key`, or size() if absent.
  std::uint64_t index_of(std::uint64_t key) const;
  bool contains(std::uint64_t key) const { return index_of(key) != size(); }
  const std::vector<std::uint64_t>& explicit_keys() const noexcept { return keys_; }

  /// Throws CapExceeded for exhaustive spaces above keylen_cap().
  void check_enumerable() const;

  bool operator==(const KeySpace& other) const noexcept {
    return kind_ == other.kind_ && key_len_ == other.key_len_ && keys_ == other.keys_;
  }

 private:
  Kind kind_ = Kind::Exhaustive;
  std::size_t key_len_ = 0;
  std::vector<std::uint64_t> keys_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted_;  // (key, index)
};

/// Input range over every key of a space, in stable order (ascending for exhaustive).
class KeyStream {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Key;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const KeySpace* ks, std::uint64_t pos) : ks_(ks), pos_(pos) {}
    Key operator*() const { return Key::from_uint(ks_->key_at(pos_), ks_->key_len()); }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    iterator operator++(int) {
      auto tmp = *this;
      ++pos_;
      return tmp;
    }
    bool operator==(const iterator& o) const noexcept { return pos_ == o.pos_; }

   private:
    const KeySpace* ks_ = nullptr;
    std::uint64_t pos_ = 0;
  };

  explicit KeyStream(KeySpace ks) : ks_(std::move(ks)) {}
  iterator begin() const { return {&ks_, 0}; }
  iterator end() const { return {&ks_, ks_.size()}; }

 private:
  KeySpace ks_;
};

/// Refuses exhaustive spaces above the cap, otherwise streams every key once.
KeyStream enumerate(const KeySpace& ks);

std::string key_hex(std::uint64_t key, std::size_t key_len);
std::uint64_t parse_key_hex(const std::string& hex, std::size_t key_len);

/// A subset S of a key space. Bitset form indexes candidates by enumeration
/// position; sparse form is a sorted list of key values. Both answer the same queries.
class SurvivorSet {
 public:
  enum class Representation { Bitset, Sparse };

  static Representation default_representation(const KeySpace& ks) noexcept {
    return ks.kind() == KeySpace::Kind::Exhaustive ? Representation::Bitset
                                                   : Representation::Sparse;
  }

  static SurvivorSet full(std::shared_ptr<const KeySpace> parent);
  static SurvivorSet full(std::shared_ptr<const KeySpace> parent, Representation rep);
  static SurvivorSet from_keys(std::shared_ptr<const KeySpace> parent,
                               std::vector<std::uint64_t> keys, Representation rep);
  static SurvivorSet from_bitset(std::shared_ptr<const KeySpace> parent, Bitset members);

  const KeySpace& parent() const noexcept { return *parent_; }
  const std::shared_ptr<const KeySpace>& parent_ptr() const noexcept { return parent_; }
  Representation representation() const noexcept { return rep_; }

  std::uint64_t size() const;
  bool contains(std::uint64_t key) const;
  void erase(std::uint64_t key);
  /// Members as ascending key values.
  std::vector<std::uint64_t> members() const;
  SurvivorSet as(Representation rep) const;

  friend SurvivorSet intersect(const SurvivorSet& a, const SurvivorSet& b);

 private:
  SurvivorSet(std::shared_ptr<const KeySpace> parent, Representation rep)
      : parent_(std::move(parent)), rep_(rep) {}

  std::shared_ptr<const KeySpace> parent_;
  Representation rep_;
  Bitset bits_;                       // Bitset form
  std::vector<std::uint64_t> keys_;   // Sparse form, ascending
};

/// |S| / |K|. Throws ContractViolation for an empty parent space.
double survival_fraction(const SurvivorSet& s);

/// Throws ContractViolation when the parents differ.
SurvivorSet intersect(const SurvivorSet& a, const SurvivorSet& b);
SurvivorSet intersect_sessions(const std::vector<SurvivorSet>& subsets);

/// {"key_len": n, "size": |K|, "members": ["0a3", ...]} with ascending hex keys.
std::string survivors_to_json(const SurvivorSet& s);

/// Bitset dump: 8-byte little-endian candidate count, then ceil(count / 8) bytes where
/// candidate index i is bit (i % 8) of byte (i / 8).
void write_bitset_dump(std::ostream& out, const SurvivorSet& s);
SurvivorSet read_bitset_dump(std::istream& in, std::shared_ptr<const KeySpace> parent);

}  // namespace qia
