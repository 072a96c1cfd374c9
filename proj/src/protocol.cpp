#include "qia/protocol.hpp"

#include <string>

#include "qia/errors.hpp"

namespace qia {

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::ZawadzkiBobNonce: return "zawadzki-bob-nonce";
    case Variant::ZawadzkiAliceNonce: return "zawadzki-alice-nonce";
    case Variant::HongDecoy: return "hong-decoy";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "zawadzki-bob-nonce" || name == "bob") return Variant::ZawadzkiBobNonce;
  if (name == "zawadzki-alice-nonce" || name == "alice") return Variant::ZawadzkiAliceNonce;
  if (name == "hong-decoy" || name == "hong") return Variant::HongDecoy;
  throw InputError("unknown variant '" + std::string(name) + "'");
}

std::string_view outcome_name(Outcome o) noexcept {
  return o == Outcome::Accept ? "accept" : "reject";
}

std::string_view mode_name(Mode m) noexcept {
  return m == Mode::Authentication ? "authentication" : "security";
}

void SessionParams::validate() const {
  if (key_len == 0) throw InputError("key_len must be at least 1");
  if (nonce_len == 0) throw InputError("nonce_len must be at least 1");
  if (d == 0) throw InputError("d must be at least 1");
  if (!(decoy_prob >= 0.0 && decoy_prob <= 1.0)) {
    throw InputError("decoy_prob must lie in [0, 1]");
  }
  // A decoy probability of 1 would never emit an authentication qubit.
  if (variant == Variant::HongDecoy && decoy_prob >= 1.0) {
    throw InputError("hong-decoy sessions need decoy_prob < 1");
  }
}

Key random_key(Rng& rng, std::size_t key_len) { return Key{random_bits(rng, key_len)}; }

Challenge draw_challenge(const SessionParams& params, Rng& rng) {
  params.validate();
  Nonce nonce = sample_nonce(rng, params.nonce_len);
  HashFunction hash = sample_hash(rng, params.hash_in_len(), params.d);
  return {std::move(nonce), std::move(hash)};
}

Challenge bob_challenge(const SessionParams& params, Rng& rng) {
  if (params.variant == Variant::ZawadzkiAliceNonce) {
    throw ContractViolation("bob_challenge called in a variant where Alice issues the nonce");
  }
  return draw_challenge(params, rng);
}

BitString session_hash(const HashFunction& hash, const Nonce& nonce, const Key& key) {
  if (hash.in_len() != nonce.bits.size() + key.size()) {
    throw ContractViolation("hash input length " + std::to_string(hash.in_len()) +
                            " does not equal |r| + |k| = " +
                            std::to_string(nonce.bits.size() + key.size()));
  }
  return hash.eval(nonce.bits + key.bits);
}

std::vector<Qubit> alice_respond(const Key& k_a, const Nonce& nonce, const HashFunction& hash) {
  const BitString h_a = session_hash(hash, nonce, k_a);
  std::vector<Qubit> out;
  out.reserve(hash.d());
  for (std::size_t i = 0; i < hash.d(); ++i) out.push_back(embed(h_a[2 * i], h_a[2 * i + 1]));
  return out;
}

std::vector<HongTransmission> hong_mode_flow(const Key& k_a, const Nonce& nonce,
                                             const HashFunction& hash,
                                             const SessionParams& params, Rng& rng) {
  if (params.variant != Variant::HongDecoy) {
    throw ContractViolation("hong_mode_flow requires the hong-decoy variant");
  }
  params.validate();
  auto auth = alice_respond(k_a, nonce, hash);
  std::vector<HongTransmission> out;
  std::size_t next = 0;
  while (next < auth.size()) {
    if (rng.bernoulli(params.decoy_prob)) {
      out.push_back({random_qubit(rng), Mode::Security});
    } else {
      out.push_back({std::move(auth[next++]), Mode::Authentication});
    }
  }
  return out;
}

Verifier::Verifier(const Key& k_b, const Nonce& nonce, const HashFunction& hash,
                   const SessionParams& params, Rng& rng)
    : h_b_(session_hash(hash, nonce, k_b)),
      d_(hash.d()),
      short_circuit_(params.short_circuit),
      rng_(rng) {}

void Verifier::on_authentication_qubit(Qubit q) {
  if (next_auth_ >= d_) throw ContractViolation("more than d authentication qubits received");
  if (q.consumed()) throw ContractViolation("verifier received a consumed qubit");
  const std::size_t i = next_auth_++;
  VerifierRecord rec{Mode::Authentication, i, std::nullopt, std::nullopt};
  if (short_circuit_ && mismatch_) {
    records_.push_back(rec);
    return;
  }
  const Basis basis = basis_from_bit(h_b_[2 * i]);
  const auto m = measure(q, basis, rng_);
  rec.basis = basis;
  rec.outcome = m.outcome;
  if (m.outcome != h_b_[2 * i + 1]) mismatch_ = true;
  records_.push_back(rec);
}

void Verifier::on_decoy_qubit(Qubit q) {
  if (q.consumed()) throw ContractViolation("verifier received a consumed qubit");
  const Basis basis = basis_from_bit(rng_.next_bit());
  const auto m = measure(q, basis, rng_);
  records_.push_back({Mode::Security, std::nullopt, basis, m.outcome});
}

Outcome Verifier::outcome() const {
  if (!complete()) throw ContractViolation("verifier decision requested before all d qubits");
  return mismatch_ ? Outcome::Reject : Outcome::Accept;
}

Outcome bob_verify(const Key& k_b, const Nonce& nonce, const HashFunction& hash,
                   std::vector<Qubit> qubits, Rng& rng) {
  if (qubits.size() != hash.d()) {
    throw ContractViolation("bob_verify expects exactly d qubits");
  }
  SessionParams params;
  params.key_len = k_b.size();
  params.nonce_len = nonce.bits.size();
  params.d = hash.d();
  Verifier v(k_b, nonce, hash, params, rng);
  for (auto& q : qubits) v.on_authentication_qubit(std::move(q));
  return v.outcome();
}

}  // namespace qia
