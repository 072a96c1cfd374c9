#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qia/errors.hpp"
#include "qia/session.hpp"

using namespace qia;

namespace {

SessionParams small_params(Variant v = Variant::ZawadzkiBobNonce, std::size_t d = 4) {
  SessionParams p;
  p.key_len = 8;
  p.nonce_len = 32;
  p.d = d;
  p.variant = v;
  return p;
}

}  // namespace

TEST_CASE("bob_challenge: reproducible, fresh, and sized for the session") {
  const auto p = SessionParams{};
  Rng a(1), b(1);
  const auto c1 = bob_challenge(p, a);
  const auto c2 = bob_challenge(p, b);
  CHECK(c1.nonce == c2.nonce);
  CHECK(c1.hash == c2.hash);
  CHECK(c1.hash.in_len() == p.nonce_len + p.key_len);
  CHECK(c1.hash.out_len() == 2 * p.d);

  std::set<std::string> nonces;
  for (int i = 0; i < 10000; ++i) nonces.insert(bob_challenge(p, a).nonce.bits.to_hex());
  CHECK(nonces.size() == 10000);

  auto alice_nonce = p;
  alice_nonce.variant = Variant::ZawadzkiAliceNonce;
  CHECK_THROWS_AS(bob_challenge(alice_nonce, a), ContractViolation);
}

TEST_CASE("alice_respond: h_a = 00 10 gives |0>, |+>") {
  // Search for a (seed, key) whose 4-bit hash output is exactly 0010.
  const Nonce nonce{BitString::from_string("1100")};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 10000 && !found; ++seed) {
    const auto h = HashFunction::from_seed(seed, 8, 2);
    const Key k = Key::from_uint(seed % 16, 4);
    if (session_hash(h, nonce, k).to_string() != "0010") continue;
    found = true;
    auto qubits = alice_respond(k, nonce, h);
    REQUIRE(qubits.size() == 2);
    CHECK(qubits[0].name() == "|0>");
    CHECK(qubits[1].name() == "|+>");
  }
  CHECK(found);
}

TEST_CASE("alice_respond: an all-zero hash gives d copies of |0>") {
  const Nonce nonce{BitString::from_string("01")};
  bool found = false;
  for (std::uint64_t seed = 0; seed < 100000 && !found; ++seed) {
    const auto h = HashFunction::from_seed(seed, 4, 3);
    const Key k = Key::from_uint(seed % 4, 2);
    if (session_hash(h, nonce, k) != BitString(6)) continue;
    found = true;
    for (const auto& q : alice_respond(k, nonce, h)) CHECK(q.name() == "|0>");
  }
  CHECK(found);
}

TEST_CASE("hash-pair framing: qubit i encodes hash bits (2i, 2i+1)") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = small_params(Variant::ZawadzkiBobNonce, 1 + rng.below(20));
    const auto c = bob_challenge(p, rng);
    const Key k = random_key(rng, p.key_len);
    const auto h = oracle::hash_key(c.hash, c.nonce.bits, k.value(), p.key_len);
    const auto qubits = alice_respond(k, c.nonce, c.hash);
    REQUIRE(qubits.size() == p.d);
    for (std::size_t i = 0; i < p.d; ++i) {
      CHECK(basis_bit(qubits[i].basis()) == bool(h[2 * i]));
      CHECK(qubits[i].value() == bool(h[2 * i + 1]));
    }
  }
}

TEST_CASE("alice_respond rejects a hash of the wrong input length") {
  const auto h = HashFunction::from_seed(1, 10, 2);
  CHECK_THROWS_AS(alice_respond(Key::from_uint(1, 4), Nonce{BitString(4)}, h), ContractViolation);
}

TEST_CASE("bob_verify: equal keys always accept") {
  Rng rng(6);
  for (int i = 0; i < 2000; ++i) {
    const auto p = small_params(Variant::ZawadzkiBobNonce, 16);
    const auto c = bob_challenge(p, rng);
    const Key k = random_key(rng, p.key_len);
    CHECK(bob_verify(k, c.nonce, c.hash, alice_respond(k, c.nonce, c.hash), rng) == Outcome::Accept);
  }
}

TEST_CASE("bob_verify: same basis bit with a different value bit always rejects") {
  Rng rng(7);
  int cases = 0;
  for (int i = 0; i < 500; ++i) {
    const auto p = small_params(Variant::ZawadzkiBobNonce, 4);
    const auto c = bob_challenge(p, rng);
    const Key ka = random_key(rng, p.key_len);
    const Key kb = random_key(rng, p.key_len);
    const auto ha = session_hash(c.hash, c.nonce, ka);
    const auto hb = session_hash(c.hash, c.nonce, kb);
    bool conflict = false;
    for (std::size_t j = 0; j < p.d; ++j) conflict |= ha[2 * j] == hb[2 * j] && ha[2 * j + 1] != hb[2 * j + 1];
    if (!conflict) continue;
    ++cases;
    for (int rep = 0; rep < 5; ++rep) {
      CHECK(bob_verify(kb, c.nonce, c.hash, alice_respond(ka, c.nonce, c.hash), rng) == Outcome::Reject);
    }
  }
  CHECK(cases > 100);
}

TEST_CASE("bob_verify: unequal keys pass each pair with probability 1/2") {
  Rng rng(8);
  constexpr int kTrials = 20000;
  const auto p = small_params(Variant::ZawadzkiBobNonce, 4);
  int accepts = 0;
  for (int i = 0; i < kTrials; ++i) {
    const auto c = bob_challenge(p, rng);
    const Key ka = random_key(rng, p.key_len);
    Key kb = random_key(rng, p.key_len);
    if (kb == ka) kb.bits.set(0, !kb.bits[0]);
    accepts += bob_verify(kb, c.nonce, c.hash, alice_respond(ka, c.nonce, c.hash), rng) == Outcome::Accept;
  }
  CHECK(std::abs(double(accepts) / kTrials - 0.0625) <= 4 * oracle::binomial_sigma(0.0625, kTrials));
}

TEST_CASE("bob_verify refuses consumed qubits and wrong counts") {
  Rng rng(9);
  const auto p = small_params();
  const auto c = bob_challenge(p, rng);
  const Key k = random_key(rng, p.key_len);
  auto qubits = alice_respond(k, c.nonce, c.hash);
  qubits[2].release();
  CHECK_THROWS_AS(bob_verify(k, c.nonce, c.hash, std::move(qubits), rng), ContractViolation);
  CHECK_THROWS_AS(bob_verify(k, c.nonce, c.hash, {}, rng), ContractViolation);
}

TEST_CASE("completeness: every variant accepts equal keys without an adversary") {
  for (auto v : {Variant::ZawadzkiBobNonce, Variant::ZawadzkiAliceNonce, Variant::HongDecoy}) {
    for (std::size_t d : {1, 4, 16, 33}) {
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto p = small_params(v, d);
        Rng key_rng(seed + 1000);
        const Key k = random_key(key_rng, p.key_len);
        const auto t = run_session(k, k, p, std::nullopt, Rng(seed));
        REQUIRE(t.outcome == Outcome::Accept);
      }
    }
  }
}

TEST_CASE("full measurement is the default; short-circuit skips after a mismatch") {
  auto p = small_params(Variant::ZawadzkiBobNonce, 16);
  const Key ka = Key::from_uint(1, 8);
  const Key kb = Key::from_uint(2, 8);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto full = run_session(ka, kb, p, std::nullopt, Rng(seed));
    for (const auto& e : full.events) CHECK(e.bob_outcome.has_value());
  }
  p.short_circuit = true;
  int skipped = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = run_session(ka, kb, p, std::nullopt, Rng(seed));
    CHECK(t.outcome == Outcome::Reject);
    for (const auto& e : t.events) skipped += !e.bob_outcome.has_value();
  }
  CHECK(skipped > 0);
}

TEST_CASE("run_session is deterministic given the seed") {
  for (auto v : {Variant::ZawadzkiBobNonce, Variant::ZawadzkiAliceNonce, Variant::HongDecoy}) {
    const auto p = small_params(v, 8);
    const Key ka = Key::from_uint(0x5A, 8);
    const Key kb = Key::from_uint(0x5B, 8);
    const auto strat = AdversaryStrategy::intercept(BasisPolicy::uniform_random());
    CHECK(run_session(ka, kb, p, strat, Rng(77)) == run_session(ka, kb, p, strat, Rng(77)));
    CHECK_FALSE(run_session(ka, kb, p, strat, Rng(77)) == run_session(ka, kb, p, strat, Rng(78)));
  }
}

TEST_CASE("transcripts round-trip through JSON") {
  for (auto v : {Variant::ZawadzkiBobNonce, Variant::ZawadzkiAliceNonce, Variant::HongDecoy}) {
    auto p = small_params(v, 6);
    p.nonce_len = 30;
    const Key k = Key::from_uint(0x3C, 8);
    const auto t = run_session(k, k, p, AdversaryStrategy::intercept(BasisPolicy::all_rectilinear()), Rng(3));
    const auto j = transcript_to_json(t);
    for (const char* field : {"params", "nonce_hex", "hash_seed", "events", "outcome"}) {
      CHECK(j.contains(field));
    }
    CHECK(transcript_from_json(nlohmann::json::parse(j.dump())) == t);
  }
}

TEST_CASE("classical messages follow the message flow of each variant") {
  const Key k = Key::from_uint(9, 8);
  auto t = run_session(k, k, small_params(Variant::ZawadzkiBobNonce), std::nullopt, Rng(1));
  REQUIRE(t.classical_messages.size() == 2);
  CHECK(t.classical_messages[0] == ClassicalMessage{"bob", "alice", "CHALLENGE"});
  CHECK(t.classical_messages[1] == ClassicalMessage{"bob", "alice", "RESULT"});

  t = run_session(k, k, small_params(Variant::ZawadzkiAliceNonce), std::nullopt, Rng(1));
  CHECK(t.classical_messages[0] == ClassicalMessage{"alice", "bob", "NONCE_HASH_FROM_ALICE"});
  CHECK(t.classical_messages.back().type == "RESULT");

  t = run_session(k, k, small_params(Variant::HongDecoy), std::nullopt, Rng(1));
  CHECK(t.classical_messages.size() == 2 + 2 * t.events.size());
}

TEST_CASE("hong_mode_flow with decoy_prob 0 matches alice_respond") {
  auto p = small_params(Variant::HongDecoy, 12);
  p.decoy_prob = 0.0;
  Rng rng(4);
  const auto c = bob_challenge(p, rng);
  const Key k = random_key(rng, p.key_len);
  auto flow = hong_mode_flow(k, c.nonce, c.hash, p, rng);
  auto plain = alice_respond(k, c.nonce, c.hash);
  REQUIRE(flow.size() == plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    CHECK(flow[i].mode == Mode::Authentication);
    CHECK(flow[i].qubit.name() == plain[i].name());
  }
}

TEST_CASE("hong_mode_flow interleaves decoys at the configured rate") {
  auto p = small_params(Variant::HongDecoy, 16);
  p.decoy_prob = 0.5;
  Rng rng(12);
  std::uint64_t decoys = 0, total = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto c = bob_challenge(p, rng);
    const Key k = random_key(rng, p.key_len);
    const auto flow = hong_mode_flow(k, c.nonce, c.hash, p, rng);
    std::size_t auth = 0;
    for (const auto& t : flow) {
      decoys += t.mode == Mode::Security;
      auth += t.mode == Mode::Authentication;
    }
    REQUIRE(auth == p.d);
    total += flow.size();
  }
  const double frac = double(decoys) / double(total);
  CHECK(std::abs(frac - 0.5) <= 4 * oracle::binomial_sigma(0.5, double(total)));
}

TEST_CASE("session parameters are validated") {
  SessionParams p;
  p.d = 0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = SessionParams{};
  p.decoy_prob = 1.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = SessionParams{};
  p.variant = Variant::HongDecoy;
  p.decoy_prob = 1.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK_THROWS_AS(run_session(Key::from_uint(0, 4), Key::from_uint(0, 4), SessionParams{}, std::nullopt, Rng(0)),
                  InputError);
}
