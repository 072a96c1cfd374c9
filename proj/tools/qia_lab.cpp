// qia_lab: experiment driver and wire roles for the QIA simulator.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qia/errors.hpp"
#include "qia/experiment.hpp"
#include "qia/keyspace.hpp"
#include "qia/session_wire.hpp"
#include "qia/transport.hpp"

using namespace qia;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kUsage = 2, kProtocol = 3, kTransport = 4 };

struct Common {
  std::string variant = "zawadzki-bob-nonce";
  std::size_t key_len = 16;
  std::size_t d = 16;
  std::size_t nonce_len = 128;
  double decoy_prob = 0.5;
  bool short_circuit = false;
  std::uint64_t seed = 1;
  std::string out = "json";

  SessionParams params() const {
    SessionParams p;
    p.variant = parse_variant(variant);
    p.key_len = key_len;
    p.d = d;
    p.nonce_len = nonce_len;
    p.decoy_prob = decoy_prob;
    p.short_circuit = short_circuit;
    p.validate();
    return p;
  }
};

struct Net {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7700;
  std::uint64_t sessions = 1;
  std::string key;
  double connect_timeout_s = 10.0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--variant", c.variant, "zawadzki-bob-nonce | zawadzki-alice-nonce | hong-decoy")
      ->capture_default_str();
  app->add_option("--key-len", c.key_len, "Key length in bits")->capture_default_str();
  app->add_option("--d", c.d, "Authentication qubits per session")->capture_default_str();
  app->add_option("--nonce-len", c.nonce_len, "Nonce length in bits")->capture_default_str();
  app->add_option("--decoy-prob", c.decoy_prob, "Security-mode probability (hong-decoy)")
      ->capture_default_str();
  app->add_flag("--short-circuit", c.short_circuit, "Verifier stops measuring after a mismatch");
  app->add_option("--seed", c.seed, "Root seed")->capture_default_str();
  app->add_option("--out", c.out, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void add_net(CLI::App* app, Net& n) {
  app->add_option("--host", n.host)->capture_default_str();
  app->add_option("--port", n.port)->capture_default_str();
  app->add_option("--sessions", n.sessions, "Sessions to run, one connection each")
      ->capture_default_str();
  app->add_option("--connect-timeout", n.connect_timeout_s, "Seconds to retry connecting")
      ->capture_default_str();
}

void emit_report(const ExperimentReport& r, const std::string& out) {
  if (out == "csv") {
    write_report_csv(std::cout, r);
  } else {
    std::cout << report_to_json(r).dump(2) << '\n';
  }
}

Key session_key(const Net& n, const SessionParams& p, std::uint64_t seed) {
  if (!n.key.empty()) return Key::from_uint(parse_key_hex(n.key, p.key_len), p.key_len);
  Rng rng = Rng(seed).stream("key");
  return random_key(rng, p.key_len);
}

TcpStream connect_with_retry(const std::string& host, std::uint16_t port, double timeout_s) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  for (;;) {
    try {
      return TcpStream::connect(host, port);
    } catch (const TransportError&) {
      if (std::chrono::steady_clock::now() >= deadline) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }
}

void emit_sessions(const char* role, const json& sessions, const std::string& out,
                   const std::function<std::string(const json&)>& outcome_of) {
  if (out == "csv") {
    std::cout << "session,outcome\n";
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      std::cout << i << ',' << outcome_of(sessions[i]) << '\n';
    }
    return;
  }
  std::cout << json{{"role", role}, {"sessions", sessions}}.dump(2) << '\n';
}

std::string outcome_field(const json& j, const char* field) {
  return j.at(field).is_null() ? "none" : j.at(field).get<std::string>();
}

// Re-runs trial 0 of an attack experiment to export its survivor set and likelihood scores.
void export_trial_zero(const SessionParams& p, const std::vector<BasisPolicy>& policies,
                       std::size_t sessions, std::uint64_t seed, const std::string& dump_path,
                       const std::string& json_path, const std::string& scores_path) {
  auto keyspace = std::make_shared<const KeySpace>(KeySpace::exhaustive(p.key_len));
  Rng rng = trial_rng(seed, 0);
  Rng key_rng = rng.stream("keys");
  const Key key = random_key(key_rng, p.key_len);
  std::optional<SurvivorSet> running;
  std::vector<SessionObservations> observed;
  for (std::size_t s = 0; s < sessions; ++s) {
    const auto strategy = AdversaryStrategy::intercept(policies[s % policies.size()]);
    const Transcript t = run_session(key, key, p, strategy, rng.stream("session").stream(s));
    observed.push_back({t.hash(), t.nonce, extract_observations(t)});
    auto survivors = eliminate(keyspace, t.hash(), t.nonce, observed.back().observations);
    running = running ? intersect(*running, survivors) : std::move(survivors);
  }
  if (!dump_path.empty()) {
    std::ofstream f(dump_path, std::ios::binary);
    write_bitset_dump(f, *running);
    if (!f) throw InputError("cannot write " + dump_path);
  }
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    f << survivors_to_json(*running) << '\n';
    if (!f) throw InputError("cannot write " + json_path);
  }
  if (!scores_path.empty()) {
    std::ofstream f(scores_path);
    const auto scores = likelihood_score(*keyspace, observed);
    write_scores_csv(f, scores, p.key_len);
    if (!f) throw InputError("cannot write " + scores_path);
  }
}

AdversaryStrategy make_strategy(const std::string& name, const std::string& policy, std::size_t d) {
  if (name == "transparent") return AdversaryStrategy::transparent();
  if (name == "store-forward") return AdversaryStrategy::store_forward();
  auto strat = AdversaryStrategy::intercept(BasisPolicy::parse(policy));
  strat.policy.validate(d);
  return strat;
}

int run(int argc, char** argv) {
  CLI::App app{"Quantum identity authentication lab: honest runs, attacks, replay and wire roles"};
  app.require_subcommand(1);

  Common c;
  Net net;
  std::uint64_t trials = 1000;
  std::string policy = "rect";
  std::size_t sessions = 1;
  std::string strategy = "transparent";
  std::string to_host = "127.0.0.1";
  std::uint16_t to_port = 7701;
  std::string dump_path, json_path, scores_path;

  auto* honest = app.add_subcommand("honest", "Equal-key and unequal-key honest sessions");
  add_common(honest, c);
  honest->add_option("--trials", trials)->capture_default_str();

  auto* attack = app.add_subcommand("attack", "Intercept-measure key-space reduction");
  add_common(attack, c);
  attack->add_option("--trials", trials)->capture_default_str();
  attack->add_option("--policy", policy, "rect | diag | random | 0/1 pattern | alternate | comma list")
      ->capture_default_str();
  attack->add_option("--sessions", sessions, "Intercepted sessions per trial")->capture_default_str();
  attack->add_option("--dump-survivors", dump_path, "Bitset dump of trial 0's survivor set");
  attack->add_option("--survivors-json", json_path, "JSON export of trial 0's survivor set");
  attack->add_option("--scores", scores_path, "Likelihood CSV for trial 0");

  auto* replay = app.add_subcommand("replay", "Quantum-memory replay and live relay");
  add_common(replay, c);
  replay->add_option("--trials", trials)->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run Bob, accepting one connection per session");
  add_common(serve, c);
  add_net(serve, net);
  serve->add_option("--key", net.key, "Bob's key in hex (default derived from --seed)");

  auto* connect = app.add_subcommand("connect", "Run Alice, connecting once per session");
  add_common(connect, c);
  add_net(connect, net);
  connect->add_option("--key", net.key, "Alice's key in hex (default derived from --seed)");

  auto* proxy = app.add_subcommand("proxy", "Run Eve between Alice and Bob");
  add_common(proxy, c);
  add_net(proxy, net);
  proxy->add_option("--to-host", to_host, "Bob's host")->capture_default_str();
  proxy->add_option("--to-port", to_port, "Bob's port")->capture_default_str();
  proxy->add_option("--strategy", strategy, "transparent | store-forward | intercept")
      ->check(CLI::IsMember({"transparent", "store-forward", "intercept"}))
      ->capture_default_str();
  proxy->add_option("--policy", policy, "Basis policy for intercept")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "In-process equivalent of a serve/proxy/connect run");
  add_common(simulate, c);
  add_net(simulate, net);
  simulate->add_option("--key", net.key, "Key for both parties in hex (default derived from --seed)");
  simulate->add_option("--strategy", strategy, "none | transparent | store-forward | intercept")
      ->check(CLI::IsMember({"none", "transparent", "store-forward", "intercept"}))
      ->capture_default_str();
  simulate->add_option("--policy", policy, "Basis policy for intercept")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const SessionParams p = c.params();

  if (honest->parsed()) {
    emit_report(cmd_honest(p, trials, c.seed), c.out);
  } else if (attack->parsed()) {
    const auto policies = parse_policy_cycle(policy);
    emit_report(cmd_attack(p, policies, sessions, trials, c.seed), c.out);
    if (!dump_path.empty() || !json_path.empty() || !scores_path.empty()) {
      export_trial_zero(p, policies, sessions, c.seed, dump_path, json_path, scores_path);
    }
  } else if (replay->parsed()) {
    emit_report(cmd_replay(p, trials, c.seed), c.out);
  } else if (serve->parsed()) {
    const Key key = session_key(net, p, c.seed);
    TcpListener listener(net.host, net.port);
    std::cerr << "bob listening on " << net.host << ':' << listener.port() << '\n';
    json logs = json::array();
    for (std::uint64_t i = 0; i < net.sessions; ++i) {
      TcpStream s = listener.accept();
      FrameChannel ch(s);
      logs.push_back(verifier_log_to_json(run_bob(ch, key, p, trial_rng(c.seed, i))));
    }
    emit_sessions("bob", logs, c.out, [](const json& j) { return outcome_field(j, "outcome"); });
  } else if (connect->parsed()) {
    const Key key = session_key(net, p, c.seed);
    json logs = json::array();
    for (std::uint64_t i = 0; i < net.sessions; ++i) {
      TcpStream s = connect_with_retry(net.host, net.port, net.connect_timeout_s);
      FrameChannel ch(s);
      logs.push_back(prover_log_to_json(run_alice(ch, key, p, trial_rng(c.seed, i))));
    }
    emit_sessions("alice", logs, c.out, [](const json& j) { return outcome_field(j, "result"); });
  } else if (simulate->parsed()) {
    const Key key = session_key(net, p, c.seed);
    const auto strat = strategy == "none" ? std::nullopt
                                          : std::optional(make_strategy(strategy, policy, p.d));
    json transcripts = json::array();
    for (std::uint64_t i = 0; i < net.sessions; ++i) {
      transcripts.push_back(transcript_to_json(run_session(key, key, p, strat, trial_rng(c.seed, i))));
    }
    emit_sessions("simulation", transcripts, c.out,
                  [](const json& j) { return outcome_field(j, "outcome"); });
  } else if (proxy->parsed()) {
    const auto strat = make_strategy(strategy, policy, p.d);
    TcpListener listener(net.host, net.port);
    std::cerr << "eve listening on " << net.host << ':' << listener.port() << '\n';
    json logs = json::array();
    bool aborted = false;
    for (std::uint64_t i = 0; i < net.sessions; ++i) {
      TcpStream up = listener.accept();
      TcpStream down = connect_with_retry(to_host, to_port, net.connect_timeout_s);
      const auto log = proxy_session(up, down, strat, trial_rng(c.seed, i));
      aborted = aborted || log.aborted;
      logs.push_back(adversary_log_to_json(log));
    }
    emit_sessions("eve", logs, c.out,
                  [](const json& j) { return std::string(j.at("aborted").get<bool>() ? "aborted" : "complete"); });
    if (aborted) return kTransport;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FramingError& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const ReplayError& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const ContractViolation& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
