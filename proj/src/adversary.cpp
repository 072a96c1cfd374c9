#include "qia/adversary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>

#include "qia/errors.hpp"

namespace qia {

// --- BasisPolicy ----------------------------------------------------------

BasisPolicy BasisPolicy::fixed(std::vector<Basis> pattern) {
  if (pattern.empty()) throw InputError("fixed basis pattern must not be empty");
  return BasisPolicy(Kind::FixedPattern, std::move(pattern));
}

BasisPolicy BasisPolicy::parse(std::string_view text) {
  if (text == "rect" || text == "rectilinear") return all_rectilinear();
  if (text == "diag" || text == "diagonal") return all_diagonal();
  if (text == "random") return uniform_random();
  std::vector<Basis> pattern;
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw InputError("basis policy must be rect, diag, random or a 0/1 pattern");
    }
    pattern.push_back(basis_from_bit(c == '1'));
  }
  return fixed(std::move(pattern));
}

std::string BasisPolicy::describe() const {
  switch (kind_) {
    case Kind::AllRectilinear: return "rect";
    case Kind::AllDiagonal: return "diag";
    case Kind::UniformRandomPerQubit: return "random";
    case Kind::FixedPattern: {
      std::string s;
      for (auto b : pattern_) s.push_back(basis_bit(b) ? '1' : '0');
      return s;
    }
  }
  return "?";
}

void BasisPolicy::validate(std::size_t d) const {
  if (kind_ == Kind::FixedPattern && pattern_.size() != d) {
    throw InputError("fixed basis pattern has " + std::to_string(pattern_.size()) +
                     " entries, expected d = " + std::to_string(d));
  }
}

Basis BasisPolicy::choose(std::size_t transmission, Rng& rng) const {
  switch (kind_) {
    case Kind::AllRectilinear: return Basis::Rectilinear;
    case Kind::AllDiagonal: return Basis::Diagonal;
    case Kind::UniformRandomPerQubit: return basis_from_bit(rng.next_bit());
    case Kind::FixedPattern: return pattern_[transmission % pattern_.size()];
  }
  return Basis::Rectilinear;
}

InterceptResult intercept_measure(std::vector<Qubit> qubits, const BasisPolicy& policy, Rng& rng,
                                  std::uint64_t session_id) {
  policy.validate(qubits.size());
  InterceptResult out;
  out.observations.reserve(qubits.size());
  out.forwarded.reserve(qubits.size());
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i].consumed()) throw ContractViolation("intercepted qubit already consumed");
    const Basis b = policy.choose(i, rng);
    auto m = measure(qubits[i], b, rng);
    out.observations.push_back({i, b, m.outcome, session_id, false});
    out.forwarded.push_back(std::move(m.post));
  }
  return out;
}

// --- Interceptor ----------------------------------------------------------

std::string_view action_name(AdversaryAction a) noexcept {
  switch (a) {
    case AdversaryAction::Relay: return "relay";
    case AdversaryAction::Store: return "store";
    case AdversaryAction::Measure: return "measure";
  }
  return "?";
}

std::string AdversaryStrategy::describe() const {
  switch (kind) {
    case Kind::TransparentRelay: return "transparent";
    case Kind::StoreForward: return "store-forward";
    case Kind::InterceptMeasure: return "intercept:" + policy.describe();
  }
  return "?";
}

Interceptor::Interceptor(AdversaryStrategy strategy, Rng rng, std::uint64_t session_id)
    : strategy_(std::move(strategy)), rng_(rng), session_id_(session_id) {}

Qubit Interceptor::on_qubit(Qubit q) {
  if (q.consumed()) throw ContractViolation("intercepted qubit already consumed");
  const std::size_t t = events_.size();
  modes_.emplace_back();
  switch (strategy_.kind) {
    case AdversaryStrategy::Kind::TransparentRelay:
      events_.push_back({AdversaryAction::Relay, std::nullopt, std::nullopt});
      return q;
    case AdversaryStrategy::Kind::StoreForward:
      events_.push_back({AdversaryAction::Store, std::nullopt, std::nullopt});
      return q;
    case AdversaryStrategy::Kind::InterceptMeasure: {
      const Basis b = strategy_.policy.choose(t, rng_);
      auto m = measure(q, b, rng_);
      events_.push_back({AdversaryAction::Measure, b, m.outcome});
      return std::move(m.post);
    }
  }
  throw ContractViolation("unknown adversary strategy");
}

void Interceptor::on_mode(std::size_t transmission, Mode mode) {
  if (transmission >= modes_.size()) {
    throw ContractViolation("mode announced for a transmission that was never intercepted");
  }
  modes_[transmission] = mode;
}

std::vector<Observation> Interceptor::all_observations() const {
  std::vector<Observation> out;
  std::size_t auth = 0;
  for (std::size_t t = 0; t < events_.size(); ++t) {
    const bool decoy = modes_[t] == Mode::Security;
    const std::size_t index = decoy ? t : auth++;
    if (events_[t].action == AdversaryAction::Measure) {
      out.push_back({index, *events_[t].basis, *events_[t].outcome, session_id_, decoy});
    }
  }
  return out;
}

std::vector<Observation> Interceptor::observations() const {
  auto all = all_observations();
  std::erase_if(all, [](const Observation& o) { return o.decoy; });
  return all;
}

// --- KeyHasher ------------------------------------------------------------

KeyHasher::KeyHasher(const HashFunction& hash, const Nonce& nonce, std::size_t key_len)
    : key_len_(key_len) {
  if (hash.in_len() != nonce.bits.size() + key_len) {
    throw ContractViolation("hash input length does not equal |r| + key_len");
  }
  if (key_len == 0 || key_len > 63) throw InputError("key_len must be in [1, 63]");
  base_ = hash.eval_words((nonce.bits + BitString(key_len)).to_words());
  columns_.reserve(key_len);
  // Integer bit q of the key sits at string position key_len - 1 - q.
  for (std::size_t q = 0; q < key_len; ++q) {
    columns_.push_back(hash.column_words(nonce.bits.size() + key_len - 1 - q));
  }
}

std::vector<std::uint64_t> KeyHasher::hash(std::uint64_t key) const {
  std::vector<std::uint64_t> h = base_;
  for (std::size_t q = 0; q < key_len_; ++q) {
    if ((key >> q) & 1U) {
      for (std::size_t w = 0; w < h.size(); ++w) h[w] ^= columns_[q][w];
    }
  }
  return h;
}

// --- Elimination ------------------------------------------------------------

namespace {

constexpr std::uint64_t kEvenBits = 0x5555555555555555ULL;

// One constraint layer holds at most one observation per pair. For each word, `pattern`
// carries the impossible (basis, value) bits and `mask` the even (basis) positions of
// the observed pairs. `basis` carries Eve's basis bits for the cross-basis count.
struct Layer {
  std::vector<std::uint64_t> pattern;
  std::vector<std::uint64_t> basis;
  std::vector<std::uint64_t> mask;
};

std::vector<Layer> build_layers(std::span<const Observation> obs, std::size_t d) {
  const std::size_t words = (2 * d + 63) / 64;
  std::vector<Layer> layers;
  std::vector<std::size_t> depth(d, 0);
  for (const auto& o : obs) {
    if (o.qubit_index >= d) {
      throw ContractViolation("observation index " + std::to_string(o.qubit_index) +
                              " out of range for d = " + std::to_string(d));
    }
    const std::size_t layer = depth[o.qubit_index]++;
    if (layer == layers.size()) {
      layers.push_back({std::vector<std::uint64_t>(words), std::vector<std::uint64_t>(words),
                        std::vector<std::uint64_t>(words)});
    }
    auto& l = layers[layer];
    const std::size_t bit = (2 * o.qubit_index) % 64;
    const std::size_t w = (2 * o.qubit_index) / 64;
    l.mask[w] |= std::uint64_t{1} << bit;
    if (basis_bit(o.meas_basis)) {
      l.pattern[w] |= std::uint64_t{1} << bit;
      l.basis[w] |= std::uint64_t{1} << bit;
    }
    if (!o.outcome) l.pattern[w] |= std::uint64_t{1} << (bit + 1);
  }
  return layers;
}

bool contradicts(std::span<const std::uint64_t> h, const std::vector<Layer>& layers) {
  for (const auto& l : layers) {
    for (std::size_t w = 0; w < h.size(); ++w) {
      const std::uint64_t x = h[w] ^ l.pattern[w];
      if (~(x | (x >> 1)) & l.mask[w]) return true;
    }
  }
  return false;
}

std::uint64_t cross_basis_count(std::span<const std::uint64_t> h, const std::vector<Layer>& layers) {
  std::uint64_t n = 0;
  for (const auto& l : layers) {
    for (std::size_t w = 0; w < h.size(); ++w) {
      n += static_cast<std::uint64_t>(std::popcount((h[w] ^ l.basis[w]) & l.mask[w] & kEvenBits));
    }
  }
  return n;
}

}  // namespace

SurvivorSet eliminate(std::shared_ptr<const KeySpace> keyspace, const HashFunction& hash,
                      const Nonce& nonce, std::span<const Observation> observations) {
  keyspace->check_enumerable();
  const auto layers = build_layers(observations, hash.d());
  const KeyHasher hasher(hash, nonce, keyspace->key_len());
  Bitset alive(keyspace->size(), true);
  if (keyspace->kind() == KeySpace::Kind::Exhaustive) {
    hasher.for_each_gray([&](std::uint64_t key, std::span<const std::uint64_t> h) {
      if (contradicts(h, layers)) alive.reset(key);
    });
    return SurvivorSet::from_bitset(std::move(keyspace), std::move(alive));
  }
  for (std::uint64_t i = 0; i < keyspace->size(); ++i) {
    if (contradicts(hasher.hash(keyspace->key_at(i)), layers)) alive.reset(i);
  }
  auto rep = SurvivorSet::default_representation(*keyspace);
  return SurvivorSet::from_bitset(std::move(keyspace), std::move(alive)).as(rep);
}

std::vector<ScoredKey> likelihood_score(const KeySpace& keyspace,
                                        std::span<const SessionObservations> sessions) {
  keyspace.check_enumerable();
  constexpr double kImpossible = -std::numeric_limits<double>::infinity();
  std::vector<ScoredKey> scores(keyspace.size());
  for (std::uint64_t i = 0; i < keyspace.size(); ++i) scores[i].key = keyspace.key_at(i);

  for (const auto& s : sessions) {
    const auto layers = build_layers(s.observations, s.hash.d());
    const KeyHasher hasher(s.hash, s.nonce, keyspace.key_len());
    auto score_one = [&](ScoredKey& sk, std::span<const std::uint64_t> h) {
      if (contradicts(h, layers)) {
        sk.log2_likelihood = kImpossible;
      } else {
        sk.log2_likelihood -= static_cast<double>(cross_basis_count(h, layers));
      }
    };
    if (keyspace.kind() == KeySpace::Kind::Exhaustive) {
      hasher.for_each_gray(
          [&](std::uint64_t key, std::span<const std::uint64_t> h) { score_one(scores[key], h); });
    } else {
      for (auto& sk : scores) score_one(sk, hasher.hash(sk.key));
    }
  }
  std::sort(scores.begin(), scores.end(), [](const ScoredKey& a, const ScoredKey& b) {
    if (a.log2_likelihood != b.log2_likelihood) return a.log2_likelihood > b.log2_likelihood;
    return a.key < b.key;
  });
  return scores;
}

std::vector<std::uint64_t> likelihood_one_stratum(std::span<const ScoredKey> scores) {
  std::vector<std::uint64_t> out;
  for (const auto& s : scores) {
    if (s.log2_likelihood == 0.0) out.push_back(s.key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_scores_csv(std::ostream& out, std::span<const ScoredKey> scores, std::size_t key_len) {
  out << "key_hex,log2_likelihood\n";
  for (const auto& s : scores) {
    out << key_hex(s.key, key_len) << ',';
    if (std::isinf(s.log2_likelihood)) {
      out << "-inf";
    } else {
      out << s.log2_likelihood;
    }
    out << '\n';
  }
}

// --- Replay -----------------------------------------------------------------

StoredTransmission capture_from_alice(const Key& alice_key, const SessionParams& params,
                                      Rng& alice_rng, Rng& eve_rng) {
  params.validate();
  if (params.variant == Variant::ZawadzkiAliceNonce) {
    Challenge c = draw_challenge(params, alice_rng);
    auto qubits = alice_respond(alice_key, c.nonce, c.hash);
    return {std::move(c.nonce), std::move(c.hash), std::move(qubits)};
  }
  // Eve plays the verifier and issues the challenge herself.
  Challenge c = draw_challenge(params, eve_rng);
  std::vector<Qubit> qubits;
  if (params.variant == Variant::HongDecoy) {
    for (auto& t : hong_mode_flow(alice_key, c.nonce, c.hash, params, alice_rng)) {
      if (t.mode == Mode::Authentication) qubits.push_back(std::move(t.qubit));
    }
  } else {
    qubits = alice_respond(alice_key, c.nonce, c.hash);
  }
  return {std::move(c.nonce), std::move(c.hash), std::move(qubits)};
}

Outcome replay_attack(Variant variant, StoredTransmission stored, const Key& verifier_key,
                      const SessionParams& params, Rng& rng) {
  if (variant == Variant::ZawadzkiAliceNonce) {
    return bob_verify(verifier_key, stored.nonce, stored.hash, std::move(stored.qubits), rng);
  }
  SessionParams fresh = params;
  fresh.variant = variant;
  Challenge c = bob_challenge(fresh, rng);
  return bob_verify(verifier_key, c.nonce, c.hash, std::move(stored.qubits), rng);
}

}  // namespace qia
