#include "qia/session_wire.hpp"

#include <atomic>
#include <string>
#include <thread>

#include "qia/errors.hpp"

namespace qia {

using nlohmann::json;

namespace {

template <typename T>
T expect(const Message& m, std::string_view context) {
  if (const auto* v = std::get_if<T>(&m)) return *v;
  throw FramingError("unexpected " + std::string(msg_type_name(message_type(m))) + " while " +
                     std::string(context));
}

ClassicalMessage logged(const Message& m, const char* from, const char* to) {
  return {from, to, std::string(msg_type_name(message_type(m)))};
}

Challenge challenge_from_msg(const ChallengeMsg& c, const SessionParams& params) {
  if (c.nonce.size() != params.nonce_len || c.in_len != params.hash_in_len() || c.d != params.d) {
    throw ContractViolation("received challenge does not match the session parameters");
  }
  return {Nonce{c.nonce}, HashFunction::from_seed(c.hash_seed, c.in_len, c.d)};
}

ChallengeMsg challenge_to_msg(const Challenge& c, bool from_alice) {
  return {c.nonce.bits, c.hash.seed(), static_cast<std::uint32_t>(c.hash.in_len()),
          static_cast<std::uint32_t>(c.hash.d()), from_alice};
}

}  // namespace

ProverLog run_alice(FrameChannel& channel, const Key& key, const SessionParams& params,
                    const Rng& session_rng) {
  params.validate();
  if (key.size() != params.key_len) throw InputError("key length must equal params.key_len");
  SessionStreams streams(session_rng);
  ProverLog log;

  Challenge c = [&] {
    if (params.variant == Variant::ZawadzkiAliceNonce) {
      Challenge own = draw_challenge(params, streams.alice);
      channel.send(challenge_to_msg(own, true));
      return own;
    }
    auto msg = expect<ChallengeMsg>(channel.recv(), "waiting for the challenge");
    if (msg.from_alice) throw FramingError("verifier sent NONCE_HASH_FROM_ALICE");
    return challenge_from_msg(msg, params);
  }();

  if (params.variant == Variant::HongDecoy) {
    auto flow = hong_mode_flow(key, c.nonce, c.hash, params, streams.alice);
    for (std::size_t t = 0; t < flow.size(); ++t) {
      log.prepared.push_back({flow[t].qubit.basis(), flow[t].qubit.value(), flow[t].mode});
      channel.send(QubitsMsg{{to_token(flow[t].qubit, t)}});
      auto ack = expect<ModeAnnounceMsg>(channel.recv(), "waiting for reception confirmation");
      if (ack.mode) throw FramingError("verifier announced a mode");
      channel.send(ModeAnnounceMsg{flow[t].mode});
    }
  } else {
    auto qubits = alice_respond(key, c.nonce, c.hash);
    QubitsMsg msg;
    for (std::size_t i = 0; i < qubits.size(); ++i) {
      log.prepared.push_back({qubits[i].basis(), qubits[i].value(), Mode::Authentication});
      msg.tokens.push_back(to_token(qubits[i], i));
    }
    channel.send(msg);
  }
  log.result = expect<ResultMsg>(channel.recv(), "waiting for the result").outcome;
  return log;
}

VerifierLog run_bob(FrameChannel& channel, const Key& key, const SessionParams& params,
                    const Rng& session_rng) {
  params.validate();
  if (key.size() != params.key_len) throw InputError("key length must equal params.key_len");
  SessionStreams streams(session_rng);
  VerifierLog log;
  TokenLedger ledger;

  Challenge c = [&] {
    if (params.variant == Variant::ZawadzkiAliceNonce) {
      const Message m = channel.recv();
      auto msg = expect<ChallengeMsg>(m, "waiting for the prover's nonce");
      if (!msg.from_alice) throw FramingError("prover sent CHALLENGE");
      log.messages.push_back(logged(m, "alice", "bob"));
      return challenge_from_msg(msg, params);
    }
    Challenge own = bob_challenge(params, streams.bob);
    const Message m = challenge_to_msg(own, false);
    channel.send(m);
    log.messages.push_back(logged(m, "bob", "alice"));
    return own;
  }();
  log.nonce = c.nonce;
  log.hash_seed = c.hash.seed();

  Verifier bob(key, c.nonce, c.hash, params, streams.bob);
  if (params.variant == Variant::HongDecoy) {
    while (!bob.complete()) {
      auto q = expect<QubitsMsg>(channel.recv(), "waiting for a qubit");
      if (q.tokens.size() != 1) throw FramingError("hong-decoy transmissions carry one qubit");
      Qubit held = ledger.admit(q.tokens[0]);
      const Message ack = ModeAnnounceMsg{};
      channel.send(ack);
      log.messages.push_back(logged(ack, "bob", "alice"));
      const Message m = channel.recv();
      auto announce = expect<ModeAnnounceMsg>(m, "waiting for the mode announcement");
      if (!announce.mode) throw FramingError("mode announcement without a mode");
      log.messages.push_back(logged(m, "alice", "bob"));
      if (*announce.mode == Mode::Authentication) {
        bob.on_authentication_qubit(std::move(held));
      } else {
        bob.on_decoy_qubit(std::move(held));
      }
    }
  } else {
    auto q = expect<QubitsMsg>(channel.recv(), "waiting for qubits");
    if (q.tokens.size() != params.d) throw FramingError("expected exactly d qubits");
    std::vector<Qubit> received;
    for (const auto& tok : q.tokens) received.push_back(ledger.admit(tok));
    for (auto& held : received) bob.on_authentication_qubit(std::move(held));
  }

  log.outcome = bob.outcome();
  log.records = bob.records();
  const Message result = ResultMsg{*log.outcome};
  channel.send(result);
  log.messages.push_back(logged(result, "bob", "alice"));
  return log;
}

AdversaryLog proxy_session(ByteStream& upstream, ByteStream& downstream,
                           const AdversaryStrategy& strategy, const Rng& session_rng) {
  SessionStreams streams(session_rng);
  Interceptor eve(strategy, streams.eve, session_rng.seed());
  FrameChannel alice(upstream);
  FrameChannel bob(downstream);
  std::atomic<bool> finished{false};
  std::atomic<bool> failed{false};
  auto teardown = [&] {
    upstream.shutdown();
    downstream.shutdown();
  };

  std::thread to_alice([&] {
    try {
      while (auto f = bob.recv_frame()) {
        if (f->type == MsgType::Result) finished = true;
        alice.send_frame(*f);
        if (finished) {
          teardown();
          return;
        }
      }
    } catch (const std::exception&) {
    }
    failed = true;
    teardown();
  });

  std::size_t announcements = 0;
  try {
    while (auto f = alice.recv_frame()) {
      if (f->type == MsgType::Qubits) {
        auto msg = std::get<QubitsMsg>(from_frame(*f));
        for (auto& tok : msg.tokens) {
          Qubit q = eve.on_qubit(Qubit(tok.basis, tok.value));
          tok = to_token(q, tok.id);
        }
        bob.send(msg);
        continue;
      }
      if (f->type == MsgType::ModeAnnounce) {
        auto m = std::get<ModeAnnounceMsg>(from_frame(*f));
        if (m.mode) eve.on_mode(announcements++, *m.mode);
      }
      bob.send_frame(*f);
    }
  } catch (const std::exception&) {
    if (!finished) failed = true;
    teardown();
  }
  if (!finished) teardown();
  to_alice.join();
  teardown();

  AdversaryLog log;
  log.strategy = strategy.describe();
  log.events = eve.events();
  log.observations = eve.observations();
  log.aborted = failed || !finished;
  return log;
}

namespace {

json basis_str(Basis b) { return basis_bit(b) ? "diag" : "rect"; }

}  // namespace

json prover_log_to_json(const ProverLog& log) {
  json prepared = json::array();
  for (const auto& p : log.prepared) {
    prepared.push_back({{"basis", basis_str(p.basis)},
                        {"value", int(p.value)},
                        {"mode", std::string(mode_name(p.mode))}});
  }
  return {{"role", "alice"},
          {"prepared_simulation_only", std::move(prepared)},
          {"result", log.result ? json(std::string(outcome_name(*log.result))) : json(nullptr)}};
}

json verifier_log_to_json(const VerifierLog& log) {
  json records = json::array();
  for (const auto& r : log.records) {
    records.push_back({{"mode", std::string(mode_name(r.mode))},
                       {"auth_index", r.auth_index ? json(*r.auth_index) : json(nullptr)},
                       {"basis", r.basis ? basis_str(*r.basis) : json(nullptr)},
                       {"outcome", r.outcome ? json(int(*r.outcome)) : json(nullptr)}});
  }
  json messages = json::array();
  for (const auto& m : log.messages) messages.push_back({{"from", m.from}, {"to", m.to}, {"type", m.type}});
  return {{"role", "bob"},
          {"nonce_hex", log.nonce.bits.to_hex()},
          {"hash_seed", log.hash_seed},
          {"records", std::move(records)},
          {"classical_messages", std::move(messages)},
          {"outcome", log.outcome ? json(std::string(outcome_name(*log.outcome))) : json(nullptr)}};
}

json adversary_log_to_json(const AdversaryLog& log) {
  json events = json::array();
  for (const auto& e : log.events) {
    events.push_back({{"action", std::string(action_name(e.action))},
                      {"basis", e.basis ? basis_str(*e.basis) : json(nullptr)},
                      {"outcome", e.outcome ? json(int(*e.outcome)) : json(nullptr)}});
  }
  json obs = json::array();
  for (const auto& o : log.observations) {
    obs.push_back({{"qubit_index", o.qubit_index},
                   {"meas_basis", basis_str(o.meas_basis)},
                   {"outcome", int(o.outcome)}});
  }
  return {{"role", "eve"},
          {"strategy", log.strategy},
          {"events", std::move(events)},
          {"observations", std::move(obs)},
          {"aborted", log.aborted}};
}

}  // namespace qia
