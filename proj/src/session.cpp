#include "qia/session.hpp"

#include "qia/errors.hpp"

namespace qia {

Transcript assemble_transcript(const SessionParams& params, std::uint64_t session_id,
                               const ProverLog& prover, const VerifierLog& verifier,
                               const AdversaryLog* adversary) {
  Transcript t;
  t.params = params;
  t.nonce = verifier.nonce;
  t.hash_seed = verifier.hash_seed;
  t.session_id = session_id;
  t.outcome = verifier.outcome;
  t.classical_messages = verifier.messages;
  if (adversary) t.adversary = adversary->strategy;

  const std::size_t n = prover.prepared.size();
  if (verifier.records.size() > n) {
    throw ContractViolation("verifier recorded more transmissions than the prover sent");
  }
  if (adversary && adversary->events.size() > n) {
    throw ContractViolation("adversary recorded more transmissions than the prover sent");
  }
  for (std::size_t i = 0; i < n; ++i) {
    QuantumEvent e;
    e.index = i;
    e.mode = prover.prepared[i].mode;
    e.prepared_basis = prover.prepared[i].basis;
    e.prepared_value = prover.prepared[i].value;
    if (adversary && i < adversary->events.size()) e.adversary = adversary->events[i];
    if (i < verifier.records.size()) {
      const auto& r = verifier.records[i];
      if (r.mode != e.mode) throw ContractViolation("prover and verifier disagree on a mode");
      e.auth_index = r.auth_index;
      e.bob_basis = r.basis;
      e.bob_outcome = r.outcome;
    }
    t.events.push_back(e);
  }
  return t;
}

Transcript run_session(const Key& alice_key, const Key& bob_key, const SessionParams& params,
                       const std::optional<AdversaryStrategy>& adversary, const Rng& rng) {
  params.validate();
  if (alice_key.size() != params.key_len || bob_key.size() != params.key_len) {
    throw InputError("key lengths must equal params.key_len");
  }
  SessionStreams streams(rng);
  ProverLog plog;
  VerifierLog vlog;
  std::optional<Interceptor> eve;
  if (adversary) {
    adversary->policy.validate(params.d);
    eve.emplace(*adversary, streams.eve, rng.seed());
  }

  Challenge c = params.variant == Variant::ZawadzkiAliceNonce
                    ? draw_challenge(params, streams.alice)
                    : bob_challenge(params, streams.bob);
  vlog.messages.push_back(params.variant == Variant::ZawadzkiAliceNonce
                              ? ClassicalMessage{"alice", "bob", "NONCE_HASH_FROM_ALICE"}
                              : ClassicalMessage{"bob", "alice", "CHALLENGE"});
  vlog.nonce = c.nonce;
  vlog.hash_seed = c.hash.seed();

  Verifier bob(bob_key, c.nonce, c.hash, params, streams.bob);
  auto through_channel = [&](Qubit q) { return eve ? eve->on_qubit(std::move(q)) : std::move(q); };

  if (params.variant == Variant::HongDecoy) {
    auto flow = hong_mode_flow(alice_key, c.nonce, c.hash, params, streams.alice);
    for (std::size_t t = 0; t < flow.size(); ++t) {
      plog.prepared.push_back({flow[t].qubit.basis(), flow[t].qubit.value(), flow[t].mode});
      Qubit received = through_channel(std::move(flow[t].qubit));
      vlog.messages.push_back({"bob", "alice", "MODE_ANNOUNCE"});
      vlog.messages.push_back({"alice", "bob", "MODE_ANNOUNCE"});
      if (eve) eve->on_mode(t, flow[t].mode);
      if (flow[t].mode == Mode::Authentication) {
        bob.on_authentication_qubit(std::move(received));
      } else {
        bob.on_decoy_qubit(std::move(received));
      }
    }
  } else {
    auto qubits = alice_respond(alice_key, c.nonce, c.hash);
    std::vector<Qubit> received;
    received.reserve(qubits.size());
    for (auto& q : qubits) {
      plog.prepared.push_back({q.basis(), q.value(), Mode::Authentication});
      received.push_back(through_channel(std::move(q)));
    }
    for (auto& q : received) bob.on_authentication_qubit(std::move(q));
  }

  vlog.outcome = bob.outcome();
  vlog.records = bob.records();
  vlog.messages.push_back({"bob", "alice", "RESULT"});

  if (!eve) return assemble_transcript(params, rng.seed(), plog, vlog, nullptr);
  AdversaryLog alog{adversary->describe(), eve->events(), eve->observations(), false};
  return assemble_transcript(params, rng.seed(), plog, vlog, &alog);
}

std::vector<Observation> extract_observations(const Transcript& t) {
  std::vector<Observation> out;
  std::size_t auth = 0;
  for (const auto& e : t.events) {
    if (e.mode != Mode::Authentication) continue;
    const std::size_t index = auth++;
    if (!e.adversary || e.adversary->action != AdversaryAction::Measure) continue;
    out.push_back({index, *e.adversary->basis, *e.adversary->outcome, t.session_id, false});
  }
  return out;
}

}  // namespace qia
