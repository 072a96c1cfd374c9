#pragma once

#include <json.hpp>

#include "qia/adversary.hpp"
#include "qia/session.hpp"
#include "qia/transport.hpp"

namespace qia {

// Party drivers for sessions carried over FrameChannels, one session per connection.
// Each driver derives its stream from `session_rng` exactly as run_session does, so a
// wire run and an in-process run with the same seed produce the same events.
//
// Message flow:
//   bob-nonce    B->A CHALLENGE, A->B QUBITS(d), B->A RESULT
//   alice-nonce  A->B NONCE_HASH_FROM_ALICE, A->B QUBITS(d), B->A RESULT
//   hong-decoy   B->A CHALLENGE, then per transmission:
//                  A->B QUBITS(1), B->A MODE_ANNOUNCE(ack), A->B MODE_ANNOUNCE(mode)
//                until d authentication qubits have arrived, then B->A RESULT

ProverLog run_alice(FrameChannel& channel, const Key& key, const SessionParams& params,
                    const Rng& session_rng);

VerifierLog run_bob(FrameChannel& channel, const Key& key, const SessionParams& params,
                    const Rng& session_rng);

/// Eve between `upstream` (Alice's connection) and `downstream` (Bob's). Classical
/// frames are relayed verbatim; qubit tokens pass through the strategy. Returns once
/// the session ends; loss of either connection before RESULT marks the log aborted and
/// tears down the other side.
AdversaryLog proxy_session(ByteStream& upstream, ByteStream& downstream,
                           const AdversaryStrategy& strategy, const Rng& session_rng);

nlohmann::json prover_log_to_json(const ProverLog& log);
nlohmann::json verifier_log_to_json(const VerifierLog& log);
nlohmann::json adversary_log_to_json(const AdversaryLog& log);

}  // namespace qia
