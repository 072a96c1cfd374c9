#include <string>

#include "qia/errors.hpp"
#include "qia/session.hpp"

namespace qia {

using nlohmann::json;

namespace {

constexpr const char* kTranscriptSchema = "qia-transcript/1";

json basis_json(Basis b) { return std::string(basis_bit(b) ? "diag" : "rect"); }

Basis basis_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "rect") return Basis::Rectilinear;
  if (s == "diag") return Basis::Diagonal;
  throw InputError("unknown basis '" + s + "'");
}

template <typename T, typename F>
json optional_json(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

}  // namespace

json params_to_json(const SessionParams& p) {
  return {{"key_len", p.key_len},
          {"nonce_len", p.nonce_len},
          {"d", p.d},
          {"variant", std::string(variant_name(p.variant))},
          {"decoy_prob", p.decoy_prob},
          {"short_circuit", p.short_circuit}};
}

SessionParams params_from_json(const json& j) {
  SessionParams p;
  p.key_len = j.at("key_len").get<std::size_t>();
  p.nonce_len = j.at("nonce_len").get<std::size_t>();
  p.d = j.at("d").get<std::size_t>();
  p.variant = parse_variant(j.at("variant").get<std::string>());
  p.decoy_prob = j.at("decoy_prob").get<double>();
  p.short_circuit = j.value("short_circuit", false);
  p.validate();
  return p;
}

json transcript_to_json(const Transcript& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    json adv = nullptr;
    if (e.adversary) {
      adv = {{"action", std::string(action_name(e.adversary->action))},
             {"basis", optional_json(e.adversary->basis, basis_json)},
             {"outcome", optional_json(e.adversary->outcome, [](bool v) { return json(int(v)); })}};
    }
    json bob = nullptr;
    if (e.bob_basis || e.bob_outcome) {
      bob = {{"basis", optional_json(e.bob_basis, basis_json)},
             {"outcome", optional_json(e.bob_outcome, [](bool v) { return json(int(v)); })}};
    }
    events.push_back({{"index", e.index},
                      {"mode", std::string(mode_name(e.mode))},
                      {"auth_index", optional_json(e.auth_index, [](std::size_t i) { return json(i); })},
                      {"ground_truth",
                       {{"simulation_only", true},
                        {"basis", basis_json(e.prepared_basis)},
                        {"value", int(e.prepared_value)}}},
                      {"adversary", adv},
                      {"bob", bob}});
  }
  json messages = json::array();
  for (const auto& m : t.classical_messages) {
    messages.push_back({{"from", m.from}, {"to", m.to}, {"type", m.type}});
  }
  return {{"schema", kTranscriptSchema},
          {"params", params_to_json(t.params)},
          {"nonce_hex", t.nonce.bits.to_hex()},
          {"hash_seed", t.hash_seed},
          {"session_id", t.session_id},
          {"events", std::move(events)},
          {"outcome", optional_json(t.outcome, [](Outcome o) { return json(std::string(outcome_name(o))); })},
          {"classical_messages", std::move(messages)},
          {"adversary", optional_json(t.adversary, [](const std::string& s) { return json(s); })}};
}

Transcript transcript_from_json(const json& j) {
  if (j.value("schema", std::string()) != kTranscriptSchema) {
    throw InputError("unsupported transcript schema");
  }
  Transcript t;
  t.params = params_from_json(j.at("params"));
  t.nonce = Nonce{BitString::from_hex(j.at("nonce_hex").get<std::string>(), t.params.nonce_len)};
  t.hash_seed = j.at("hash_seed").get<std::uint64_t>();
  t.session_id = j.value("session_id", std::uint64_t{0});
  for (const auto& je : j.at("events")) {
    QuantumEvent e;
    e.index = je.at("index").get<std::size_t>();
    const auto mode = je.at("mode").get<std::string>();
    if (mode == "authentication") {
      e.mode = Mode::Authentication;
    } else if (mode == "security") {
      e.mode = Mode::Security;
    } else {
      throw InputError("unknown mode '" + mode + "'");
    }
    if (!je.at("auth_index").is_null()) e.auth_index = je.at("auth_index").get<std::size_t>();
    const auto& gt = je.at("ground_truth");
    e.prepared_basis = basis_from_json(gt.at("basis"));
    e.prepared_value = gt.at("value").get<int>() != 0;
    if (const auto& adv = je.at("adversary"); !adv.is_null()) {
      AdversaryEvent a;
      const auto action = adv.at("action").get<std::string>();
      if (action == "relay") {
        a.action = AdversaryAction::Relay;
      } else if (action == "store") {
        a.action = AdversaryAction::Store;
      } else if (action == "measure") {
        a.action = AdversaryAction::Measure;
      } else {
        throw InputError("unknown adversary action '" + action + "'");
      }
      if (!adv.at("basis").is_null()) a.basis = basis_from_json(adv.at("basis"));
      if (!adv.at("outcome").is_null()) a.outcome = adv.at("outcome").get<int>() != 0;
      e.adversary = a;
    }
    if (const auto& bob = je.at("bob"); !bob.is_null()) {
      if (!bob.at("basis").is_null()) e.bob_basis = basis_from_json(bob.at("basis"));
      if (!bob.at("outcome").is_null()) e.bob_outcome = bob.at("outcome").get<int>() != 0;
    }
    t.events.push_back(e);
  }
  if (const auto& o = j.at("outcome"); !o.is_null()) {
    const auto s = o.get<std::string>();
    if (s != "accept" && s != "reject") throw InputError("unknown outcome '" + s + "'");
    t.outcome = s == "accept" ? Outcome::Accept : Outcome::Reject;
  }
  for (const auto& m : j.value("classical_messages", json::array())) {
    t.classical_messages.push_back(
        {m.at("from").get<std::string>(), m.at("to").get<std::string>(), m.at("type").get<std::string>()});
  }
  if (j.contains("adversary") && !j.at("adversary").is_null()) {
    t.adversary = j.at("adversary").get<std::string>();
  }
  return t;
}

}  // namespace qia
