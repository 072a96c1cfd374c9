#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qia/bits.hpp"
#include "qia/hashfam.hpp"
#include "qia/qstate.hpp"
#include "qia/rng.hpp"

namespace qia {

enum class Variant : std::uint8_t {
  ZawadzkiBobNonce,    // verifier issues (r, H)
  ZawadzkiAliceNonce,  // prover issues (r, H) alongside the qubits
  HongDecoy,           // verifier issues (r, H); prover interleaves decoys
};

std::string_view variant_name(Variant v) noexcept;
Variant parse_variant(std::string_view name);

enum class Outcome : std::uint8_t { Reject = 0, Accept = 1 };
std::string_view outcome_name(Outcome o) noexcept;

/// Transmission mode in the decoy variant. Zawadzki runs only use Authentication.
enum class Mode : std::uint8_t { Authentication = 0, Security = 1 };
std::string_view mode_name(Mode m) noexcept;

struct SessionParams {
  std::size_t key_len = 16;
  std::size_t nonce_len = 128;
  std::size_t d = 16;
  Variant variant = Variant::ZawadzkiBobNonce;
  double decoy_prob = 0.5;
  /// Stop measuring after the first mismatching pair instead of measuring all d.
  bool short_circuit = false;

  std::size_t hash_in_len() const noexcept { return nonce_len + key_len; }
  std::size_t hash_out_len() const noexcept { return 2 * d; }
  /// Throws InputError on out-of-range values.
  void validate() const;

  bool operator==(const SessionParams&) const = default;
};

struct Key {
  BitString bits;

  static Key from_uint(std::uint64_t value, std::size_t key_len) {
    return Key{BitString::from_uint(value, key_len)};
  }
  std::uint64_t value() const { return bits.to_uint(); }
  std::size_t size() const noexcept { return bits.size(); }
  bool operator==(const Key&) const = default;
};

Key random_key(Rng& rng, std::size_t key_len);

struct Challenge {
  Nonce nonce;
  HashFunction hash;
};

/// Samples the nonce and then the hash function; shared by whichever party owns them.
Challenge draw_challenge(const SessionParams& params, Rng& rng);

/// Verifier-side challenge. Throws ContractViolation under ZawadzkiAliceNonce.
Challenge bob_challenge(const SessionParams& params, Rng& rng);

/// H(r || k): the hash input is the nonce bits followed by the key bits.
BitString session_hash(const HashFunction& hash, const Nonce& nonce, const Key& key);

/// Prepares qubit i (0-based) from hash bits (2i, 2i+1), i.e. the 1-based pair (2i-1, 2i).
std::vector<Qubit> alice_respond(const Key& k_a, const Nonce& nonce, const HashFunction& hash);

struct HongTransmission {
  Qubit qubit;
  Mode mode;
};

/// Decoy-variant prover output in transmission order. Each transmission draws its
/// mode from `rng` (Security with probability decoy_prob), and security-mode
/// transmissions draw a random_qubit. Generation stops once d authentication qubits
/// have been produced. Modes are meant to be announced one at a time, after the
/// verifier confirms reception of the matching qubit.
std::vector<HongTransmission> hong_mode_flow(const Key& k_a, const Nonce& nonce,
                                             const HashFunction& hash,
                                             const SessionParams& params, Rng& rng);

/// Verifier's record of one received transmission.
struct VerifierRecord {
  Mode mode = Mode::Authentication;
  std::optional<std::size_t> auth_index;
  std::optional<Basis> basis;  // absent when skipped in short-circuit mode
  std::optional<bool> outcome;
};

/// Bob's measurement state machine for one session.
class Verifier {
 public:
  Verifier(const Key& k_b, const Nonce& nonce, const HashFunction& hash,
           const SessionParams& params, Rng& rng);

  /// Measures the next authentication qubit in basis h_b[2i] and compares to h_b[2i+1].
  void on_authentication_qubit(Qubit q);
  /// Measures a decoy in a random basis; the result takes no part in the decision.
  void on_decoy_qubit(Qubit q);

  std::size_t authenticated() const noexcept { return next_auth_; }
  bool complete() const noexcept { return next_auth_ == d_; }
  /// Accept iff every authentication pair matched. Throws if fewer than d arrived.
  Outcome outcome() const;
  const std::vector<VerifierRecord>& records() const noexcept { return records_; }

 private:
  BitString h_b_;
  std::size_t d_;
  bool short_circuit_;
  Rng& rng_;
  std::size_t next_auth_ = 0;
  bool mismatch_ = false;
  std::vector<VerifierRecord> records_;
};

/// Single-shot verification of d authentication qubits.
Outcome bob_verify(const Key& k_b, const Nonce& nonce, const HashFunction& hash,
                   std::vector<Qubit> qubits, Rng& rng);

}  // namespace qia
