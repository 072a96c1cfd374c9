#include "qia/keyspace.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "qia/errors.hpp"

namespace qia {

std::size_t keylen_cap() {
  if (const char* env = std::getenv("QIA_KEYLEN_CAP")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 63) return v;
    throw InputError("QIA_KEYLEN_CAP must be an integer in [1, 63]");
  }
  return kDefaultKeylenCap;
}

// --- Bitset ---------------------------------------------------------------

Bitset::Bitset(std::uint64_t bits, bool value)
    : size_(bits), words_((bits + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  clear_tail();
}

void Bitset::clear_tail() noexcept {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
}

std::uint64_t Bitset::count() const noexcept {
  std::uint64_t n = 0;
  for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

Bitset& Bitset::operator&=(const Bitset& other) {
  if (other.size_ != size_) throw ContractViolation("bitset sizes differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Bitset& Bitset::operator|=(const Bitset& other) {
  if (other.size_ != size_) throw ContractViolation("bitset sizes differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

// --- KeySpace -------------------------------------------------------------

KeySpace KeySpace::exhaustive(std::size_t key_len) {
  if (key_len == 0 || key_len > 63) throw InputError("exhaustive key_len must be in [1, 63]");
  KeySpace ks;
  ks.kind_ = Kind::Exhaustive;
  ks.key_len_ = key_len;
  return ks;
}

KeySpace KeySpace::explicit_list(std::size_t key_len, std::vector<std::uint64_t> keys) {
  if (key_len == 0 || key_len > 64) throw InputError("key_len must be in [1, 64]");
  KeySpace ks;
  ks.kind_ = Kind::ExplicitList;
  ks.key_len_ = key_len;
  ks.sorted_.reserve(keys.size());
  for (std::uint64_t i = 0; i < keys.size(); ++i) {
    if (key_len < 64 && (keys[i] >> key_len) != 0) {
      throw InputError("explicit key does not fit in key_len bits");
    }
    ks.sorted_.emplace_back(keys[i], i);
  }
  std::sort(ks.sorted_.begin(), ks.sorted_.end());
  for (std::size_t i = 1; i < ks.sorted_.size(); ++i) {
    if (ks.sorted_[i].first == ks.sorted_[i - 1].first) {
      throw InputError("explicit key list contains duplicates");
    }
  }
  ks.keys_ = std::move(keys);
  return ks;
}

std::uint64_t KeySpace::size() const noexcept {
  return kind_ == Kind::Exhaustive ? std::uint64_t{1} << key_len_ : keys_.size();
}

std::uint64_t KeySpace::key_at(std::uint64_t index) const {
  if (index >= size()) throw InputError("key index out of range");
  return kind_ == Kind::Exhaustive ? index : keys_[index];
}

std::uint64_t KeySpace::index_of(std::uint64_t key) const {
  if (kind_ == Kind::Exhaustive) return key < size() ? key : size();
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(),
                             std::make_pair(key, std::uint64_t{0}));
  return it != sorted_.end() && it->first == key ? it->second : size();
}

void KeySpace::check_enumerable() const {
  if (kind_ == Kind::Exhaustive && key_len_ > keylen_cap()) {
    throw CapExceeded("refusing to enumerate 2^" + std::to_string(key_len_) +
                      " keys: key_len exceeds the cap of " + std::to_string(keylen_cap()) +
                      " (raise QIA_KEYLEN_CAP to override)");
  }
}

KeyStream enumerate(const KeySpace& ks) {
  ks.check_enumerable();
  return KeyStream(ks);
}

std::string key_hex(std::uint64_t key, std::size_t key_len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s((key_len + 3) / 4, '0');
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[s.size() - 1 - i] = kDigits[(key >> (4 * i)) & 0xF];
  }
  return s;
}

std::uint64_t parse_key_hex(const std::string& hex, std::size_t key_len) {
  if (hex.empty() || hex.size() > 16) throw InputError("key hex must have 1 to 16 digits");
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(hex, &used, 16);
  } catch (const std::exception&) {
    throw InputError("invalid key hex '" + hex + "'");
  }
  if (used != hex.size()) throw InputError("invalid key hex '" + hex + "'");
  if (key_len < 64 && (v >> key_len) != 0) throw InputError("key does not fit in key_len bits");
  return v;
}

// --- SurvivorSet ----------------------------------------------------------

SurvivorSet SurvivorSet::full(std::shared_ptr<const KeySpace> parent) {
  const auto rep = default_representation(*parent);
  return full(std::move(parent), rep);
}

SurvivorSet SurvivorSet::full(std::shared_ptr<const KeySpace> parent, Representation rep) {
  parent->check_enumerable();
  SurvivorSet s(std::move(parent), rep);
  if (rep == Representation::Bitset) {
    s.bits_ = Bitset(s.parent_->size(), true);
  } else {
    s.keys_.reserve(s.parent_->size());
    for (std::uint64_t i = 0; i < s.parent_->size(); ++i) s.keys_.push_back(s.parent_->key_at(i));
    std::sort(s.keys_.begin(), s.keys_.end());
  }
  return s;
}

SurvivorSet SurvivorSet::from_keys(std::shared_ptr<const KeySpace> parent,
                                   std::vector<std::uint64_t> keys, Representation rep) {
  for (auto k : keys) {
    if (!parent->contains(k)) throw ContractViolation("survivor key outside the parent space");
  }
  SurvivorSet s(std::move(parent), rep);
  if (rep == Representation::Bitset) {
    s.parent_->check_enumerable();
    s.bits_ = Bitset(s.parent_->size());
    for (auto k : keys) s.bits_.set(s.parent_->index_of(k));
  } else {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    s.keys_ = std::move(keys);
  }
  return s;
}

SurvivorSet SurvivorSet::from_bitset(std::shared_ptr<const KeySpace> parent, Bitset members) {
  if (members.size() != parent->size()) {
    throw ContractViolation("bitset size does not match the parent space");
  }
  SurvivorSet s(std::move(parent), Representation::Bitset);
  s.bits_ = std::move(members);
  return s;
}

std::uint64_t SurvivorSet::size() const {
  return rep_ == Representation::Bitset ? bits_.count() : keys_.size();
}

bool SurvivorSet::contains(std::uint64_t key) const {
  if (rep_ == Representation::Sparse) return std::binary_search(keys_.begin(), keys_.end(), key);
  const auto idx = parent_->index_of(key);
  return idx != parent_->size() && bits_.test(idx);
}

void SurvivorSet::erase(std::uint64_t key) {
  if (rep_ == Representation::Sparse) {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it != keys_.end() && *it == key) keys_.erase(it);
    return;
  }
  const auto idx = parent_->index_of(key);
  if (idx != parent_->size()) bits_.reset(idx);
}

std::vector<std::uint64_t> SurvivorSet::members() const {
  if (rep_ == Representation::Sparse) return keys_;
  std::vector<std::uint64_t> out;
  const auto& words = bits_.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::uint64_t word = words[w]; word != 0; word &= word - 1) {
      out.push_back(parent_->key_at(w * 64 + static_cast<std::uint64_t>(std::countr_zero(word))));
    }
  }
  if (parent_->kind() == KeySpace::Kind::ExplicitList) std::sort(out.begin(), out.end());
  return out;
}

SurvivorSet SurvivorSet::as(Representation rep) const {
  if (rep == rep_) return *this;
  return from_keys(parent_, members(), rep);
}

double survival_fraction(const SurvivorSet& s) {
  if (s.parent().size() == 0) throw ContractViolation("survival fraction of an empty key space");
  return static_cast<double>(s.size()) / static_cast<double>(s.parent().size());
}

SurvivorSet intersect(const SurvivorSet& a, const SurvivorSet& b) {
  if (!(a.parent() == b.parent())) {
    throw ContractViolation("cannot intersect survivor sets over different key spaces");
  }
  if (a.rep_ == SurvivorSet::Representation::Bitset &&
      b.rep_ == SurvivorSet::Representation::Bitset) {
    SurvivorSet out = a;
    out.bits_ &= b.bits_;
    return out;
  }
  const auto bm = b.members();
  std::vector<std::uint64_t> keys;
  for (auto k : a.members()) {
    if (std::binary_search(bm.begin(), bm.end(), k)) keys.push_back(k);
  }
  return SurvivorSet::from_keys(a.parent_, std::move(keys), a.rep_);
}

SurvivorSet intersect_sessions(const std::vector<SurvivorSet>& subsets) {
  if (subsets.empty()) throw ContractViolation("intersection of zero survivor sets");
  SurvivorSet out = subsets.front();
  for (std::size_t i = 1; i < subsets.size(); ++i) out = intersect(out, subsets[i]);
  return out;
}

std::string survivors_to_json(const SurvivorSet& s) {
  nlohmann::json members = nlohmann::json::array();
  for (auto k : s.members()) members.push_back(key_hex(k, s.parent().key_len()));
  nlohmann::json j{{"key_len", s.parent().key_len()},
                   {"size", s.parent().size()},
                   {"members", std::move(members)}};
  return j.dump();
}

void write_bitset_dump(std::ostream& out, const SurvivorSet& s) {
  const std::uint64_t n = s.parent().size();
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((n >> (8 * i)) & 0xFF));
  const SurvivorSet b = s.as(SurvivorSet::Representation::Bitset);
  std::vector<char> bytes((n + 7) / 8, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (b.contains(b.parent().key_at(i))) bytes[i / 8] = static_cast<char>(bytes[i / 8] | (1 << (i % 8)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

SurvivorSet read_bitset_dump(std::istream& in, std::shared_ptr<const KeySpace> parent) {
  unsigned char header[8];
  if (!in.read(reinterpret_cast<char*>(header), 8)) throw InputError("truncated bitset dump header");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(header[i]) << (8 * i);
  if (n != parent->size()) throw InputError("bitset dump length does not match the key space");
  std::vector<char> bytes((n + 7) / 8);
  if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw InputError("truncated bitset dump body");
  }
  Bitset bits(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if ((static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1U) bits.set(i);
  }
  return SurvivorSet::from_bitset(std::move(parent), std::move(bits));
}

}  // namespace qia
