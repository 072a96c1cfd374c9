#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qia/hashfam.hpp"
#include "qia/keyspace.hpp"
#include "qia/protocol.hpp"
#include "qia/qstate.hpp"

namespace qia {

/// Eve's measurement record for one intercepted qubit.
struct Observation {
  std::size_t qubit_index = 0;  // authentication-pair index once modes are known
  Basis meas_basis = Basis::Rectilinear;
  bool outcome = false;
  std::uint64_t session_id = 0;
  bool decoy = false;

  bool operator==(const Observation&) const = default;
};

class BasisPolicy {
 public:
  enum class Kind { AllRectilinear, AllDiagonal, UniformRandomPerQubit, FixedPattern };

  static BasisPolicy all_rectilinear() { return BasisPolicy(Kind::AllRectilinear, {}); }
  static BasisPolicy all_diagonal() { return BasisPolicy(Kind::AllDiagonal, {}); }
  static BasisPolicy uniform_random() { return BasisPolicy(Kind::UniformRandomPerQubit, {}); }
  static BasisPolicy fixed(std::vector<Basis> pattern);
  /// "rect", "diag", "random", or a pattern of 0/1 digits such as "0110".
  static BasisPolicy parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  const std::vector<Basis>& pattern() const noexcept { return pattern_; }
  std::string describe() const;
  /// FixedPattern must have exactly d entries.
  void validate(std::size_t d) const;

  /// Basis for the intercepted transmission with the given index. Only the random
  /// policy draws from `rng` (one bit per call). Fixed patterns wrap around.
  Basis choose(std::size_t transmission, Rng& rng) const;

  bool operator==(const BasisPolicy&) const = default;

 private:
  BasisPolicy(Kind kind, std::vector<Basis> pattern) : kind_(kind), pattern_(std::move(pattern)) {}

  Kind kind_;
  std::vector<Basis> pattern_;
};

struct InterceptResult {
  std::vector<Observation> observations;
  std::vector<Qubit> forwarded;  // collapsed states, never the originals
};

/// Measures every qubit under `policy` and forwards the post-measurement states.
InterceptResult intercept_measure(std::vector<Qubit> qubits, const BasisPolicy& policy, Rng& rng,
                                  std::uint64_t session_id = 0);

enum class AdversaryAction : std::uint8_t { Relay, Store, Measure };
std::string_view action_name(AdversaryAction a) noexcept;

/// What Eve did to one transmission.
struct AdversaryEvent {
  AdversaryAction action = AdversaryAction::Relay;
  std::optional<Basis> basis;
  std::optional<bool> outcome;

  bool operator==(const AdversaryEvent&) const = default;
};

struct AdversaryStrategy {
  enum class Kind { TransparentRelay, StoreForward, InterceptMeasure };

  Kind kind = Kind::TransparentRelay;
  BasisPolicy policy = BasisPolicy::all_rectilinear();

  static AdversaryStrategy transparent() { return {Kind::TransparentRelay, {BasisPolicy::all_rectilinear()}}; }
  static AdversaryStrategy store_forward() { return {Kind::StoreForward, {BasisPolicy::all_rectilinear()}}; }
  static AdversaryStrategy intercept(BasisPolicy p) { return {Kind::InterceptMeasure, std::move(p)}; }
  std::string describe() const;
};

/// Eve sitting on the quantum channel of one session. Transmissions are numbered in
/// arrival order; mode announcements (decoy variant) may arrive later and flag earlier
/// transmissions. Unannounced transmissions count as authentication qubits.
class Interceptor {
 public:
  Interceptor(AdversaryStrategy strategy, Rng rng, std::uint64_t session_id = 0);

  Qubit on_qubit(Qubit q);
  void on_mode(std::size_t transmission, Mode mode);

  const std::vector<AdversaryEvent>& events() const noexcept { return events_; }
  /// Authentication-mode measurements, indexed by authentication pair.
  std::vector<Observation> observations() const;
  /// Every measurement taken, decoys flagged.
  std::vector<Observation> all_observations() const;

 private:
  AdversaryStrategy strategy_;
  Rng rng_;
  std::uint64_t session_id_;
  std::vector<AdversaryEvent> events_;
  std::vector<std::optional<Mode>> modes_;
};

/// Hash values H(r || k) for every candidate k of one session, exploiting affinity:
/// H(r || k) = H(r || 0) xor (sum of the key-bit columns of T selected by k).
class KeyHasher {
 public:
  KeyHasher(const HashFunction& hash, const Nonce& nonce, std::size_t key_len);

  std::size_t words() const noexcept { return base_.size(); }
  /// Packed hash of the key with big-endian value `key`.
  std::vector<std::uint64_t> hash(std::uint64_t key) const;
  /// Visits every key in [0, 2^key_len) in Gray-code order as fn(key, packed_hash).
  template <typename Fn>
  void for_each_gray(Fn&& fn) const;

 private:
  std::size_t key_len_;
  std::vector<std::uint64_t> base_;
  std::vector<std::vector<std::uint64_t>> columns_;  // indexed by integer bit position
};

template <typename Fn>
void KeyHasher::for_each_gray(Fn&& fn) const {
  std::vector<std::uint64_t> h = base_;
  const std::uint64_t n = std::uint64_t{1} << key_len_;
  std::uint64_t key = 0;
  for (std::uint64_t i = 0;; ++i) {
    fn(key, std::span<const std::uint64_t>(h));
    if (i + 1 == n) break;
    const auto bit = static_cast<std::size_t>(std::countr_zero(i + 1));
    key ^= std::uint64_t{1} << bit;
    const auto& col = columns_[bit];
    for (std::size_t w = 0; w < h.size(); ++w) h[w] ^= col[w];
  }
}

/// Removes every candidate whose hash puts the impossible pair (b', 1 xor v') at an
/// observed position. Throws ContractViolation for observation indices >= d.
SurvivorSet eliminate(std::shared_ptr<const KeySpace> keyspace, const HashFunction& hash,
                      const Nonce& nonce, std::span<const Observation> observations);

struct SessionObservations {
  HashFunction hash;
  Nonce nonce;
  std::vector<Observation> observations;
};

struct ScoredKey {
  std::uint64_t key = 0;
  double log2_likelihood = 0.0;  // -infinity for eliminated candidates
};

/// Per candidate: sum over observed pairs of log2 P(outcome | prepared pair), with
/// P = 1 for same-basis agreement, 0 for same-basis disagreement, 1/2 across bases.
/// Sorted by descending score, ties by ascending key.
std::vector<ScoredKey> likelihood_score(const KeySpace& keyspace,
                                        std::span<const SessionObservations> sessions);

/// Candidates of likelihood exactly 1: every observed pair was prepared in Eve's basis
/// with her outcome as its value.
std::vector<std::uint64_t> likelihood_one_stratum(std::span<const ScoredKey> scores);

/// CSV with header "key_hex,log2_likelihood"; eliminated keys print "-inf".
void write_scores_csv(std::ostream& out, std::span<const ScoredKey> scores, std::size_t key_len);

/// Material Eve holds in quantum memory after soliciting an authentication from Alice.
struct StoredTransmission {
  Nonce nonce;
  HashFunction hash;
  std::vector<Qubit> qubits;
};

/// Eve asks Alice to authenticate and keeps the authentication qubits unmeasured. When
/// the variant has the verifier issue (r, H), Eve draws them from `eve_rng`.
StoredTransmission capture_from_alice(const Key& alice_key, const SessionParams& params,
                                      Rng& alice_rng, Rng& eve_rng);

/// Eve later presents the stored material to a verifier. When Alice issues the nonce,
/// the verifier checks the stored (r, H); otherwise it issues a fresh challenge from `rng`.
Outcome replay_attack(Variant variant, StoredTransmission stored, const Key& verifier_key,
                      const SessionParams& params, Rng& rng);

}  // namespace qia
