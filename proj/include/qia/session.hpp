#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qia/adversary.hpp"
#include "qia/protocol.hpp"

namespace qia {

struct ClassicalMessage {
  std::string from;
  std::string to;
  std::string type;

  bool operator==(const ClassicalMessage&) const = default;
};

/// One transmission on the quantum channel.
struct QuantumEvent {
  std::size_t index = 0;
  Mode mode = Mode::Authentication;
  std::optional<std::size_t> auth_index;
  // Simulation-only ground truth: the state Alice prepared. Never sent on the wire.
  Basis prepared_basis = Basis::Rectilinear;
  bool prepared_value = false;
  std::optional<AdversaryEvent> adversary;
  std::optional<Basis> bob_basis;
  std::optional<bool> bob_outcome;

  bool operator==(const QuantumEvent&) const = default;
};

struct Transcript {
  SessionParams params;
  Nonce nonce;
  std::uint64_t hash_seed = 0;
  std::uint64_t session_id = 0;
  std::vector<QuantumEvent> events;
  std::optional<Outcome> outcome;  // absent when the session aborted
  std::vector<ClassicalMessage> classical_messages;
  std::optional<std::string> adversary;

  HashFunction hash() const {
    return HashFunction::from_seed(hash_seed, params.hash_in_len(), params.d);
  }
  bool operator==(const Transcript&) const = default;
};

// Per-party records. Each party only knows its own side; a Transcript is assembled
// from them, both for in-process runs and for runs split across processes.

struct PreparedState {
  Basis basis;
  bool value;
  Mode mode;
};

struct ProverLog {
  std::vector<PreparedState> prepared;
  std::optional<Outcome> result;  // as announced by the verifier
};

struct VerifierLog {
  Nonce nonce;
  std::uint64_t hash_seed = 0;
  std::vector<VerifierRecord> records;
  std::vector<ClassicalMessage> messages;  // every classical message, in order
  std::optional<Outcome> outcome;
};

struct AdversaryLog {
  std::string strategy;
  std::vector<AdversaryEvent> events;
  std::vector<Observation> observations;
  bool aborted = false;
};

/// Throws ContractViolation when the logs disagree on the number of transmissions.
Transcript assemble_transcript(const SessionParams& params, std::uint64_t session_id,
                               const ProverLog& prover, const VerifierLog& verifier,
                               const AdversaryLog* adversary);

/// Session RNG streams: every party owns one stream derived from the session seed.
struct SessionStreams {
  Rng alice;
  Rng bob;
  Rng eve;

  explicit SessionStreams(const Rng& session)
      : alice(session.stream("alice")), bob(session.stream("bob")), eve(session.stream("eve")) {}
};

/// One complete in-process session: challenge, response, optional interception, verify,
/// result announcement. All randomness comes from streams of `rng`.
Transcript run_session(const Key& alice_key, const Key& bob_key, const SessionParams& params,
                       const std::optional<AdversaryStrategy>& adversary, const Rng& rng);

/// Eve's authentication-mode measurements recovered from a transcript.
std::vector<Observation> extract_observations(const Transcript& t);

// JSON schema for transcripts. Fixed fields: params, nonce_hex, hash_seed, events, outcome.
nlohmann::json params_to_json(const SessionParams& p);
SessionParams params_from_json(const nlohmann::json& j);
nlohmann::json transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);

}  // namespace qia
