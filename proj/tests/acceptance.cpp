// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "qia/experiment.hpp"
#include "qia/session_wire.hpp"
#include "wire_harness.hpp"

using namespace qia;

namespace {

constexpr double kSigmas = 4.0;
constexpr double kCompletenessBudgetS = 5.0;
constexpr double kSurvivalBudgetS = 60.0;
constexpr std::uint64_t kRootSeed = 20190513;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double got, double expect, double sigma) {
  return std::abs(got - expect) <= kSigmas * sigma;
}

SessionParams params(std::size_t key_len, std::size_t d, Variant v = Variant::ZawadzkiBobNonce) {
  SessionParams p;
  p.key_len = key_len;
  p.d = d;
  p.variant = v;
  return p;
}

constexpr Variant kVariants[] = {Variant::ZawadzkiBobNonce, Variant::ZawadzkiAliceNonce,
                                 Variant::HongDecoy};

std::uint64_t g_containment_violations = 0;
std::uint64_t g_containment_trials = 0;

void tally(const ExperimentReport& r) {
  const auto& g = r.group("attack");
  g_containment_violations += g.containment_violations.value_or(0);
  g_containment_trials += g.trials;
}

Verdict completeness() {
  constexpr std::uint64_t kSessions = 10000;
  Verdict v;
  const auto start = Clock::now();
  for (auto variant : kVariants) {
    for (std::size_t d : {4, 8, 16}) {
      const auto p = params(16, d, variant);
      const auto recs = run_trials(kSessions, [&](std::uint64_t i) {
        Rng rng = trial_rng(kRootSeed + d, i);
        Rng key_rng = rng.stream("keys");
        const Key k = random_key(key_rng, p.key_len);
        TrialRecord r;
        r.accepted = run_session(k, k, p, std::nullopt, rng.stream("session")).outcome == Outcome::Accept;
        return r;
      });
      std::uint64_t accepted = 0;
      for (const auto& r : recs) accepted += *r.accepted;
      v.require(accepted == kSessions,
                fmt("%s d=%zu %llu/%llu", std::string(variant_name(variant)).c_str(), d,
                    (unsigned long long)accepted, (unsigned long long)kSessions));
    }
  }
  const double t = seconds_since(start);
  v.require(t < kCompletenessBudgetS, fmt("%.2fs < %.0fs", t, kCompletenessBudgetS));
  return v;
}

// Survivor-fraction check against (3/4)^d. The survivor set always holds the true key,
// so the non-true fraction is checked against the same target alongside.
void survival_check(Verdict& v, const ExperimentReport& r, double expect, const std::string& label) {
  const auto& g = r.group("attack");
  v.require(within(*g.mean_survival_fraction, expect, *g.survival_std_error),
            fmt("%s |S|/|K|=%.5f (target %.5f, 4se %.5f)", label.c_str(), *g.mean_survival_fraction,
                expect, kSigmas * *g.survival_std_error));
  v.require(within(*g.mean_nontrue_fraction, expect, *g.nontrue_std_error),
            fmt("non-true %.5f", *g.mean_nontrue_fraction));
}

Verdict survival_law() {
  Verdict v;
  const auto start = Clock::now();
  for (std::size_t d : {4, 8, 16}) {
    const auto r = cmd_attack(params(12, d), {BasisPolicy::all_rectilinear()}, 1, 200, kRootSeed + d);
    tally(r);
    survival_check(v, r, std::pow(0.75, double(d)), fmt("d=%zu", d));
  }
  const double t = seconds_since(start);
  v.require(t < kSurvivalBudgetS, fmt("%.2fs < %.0fs", t, kSurvivalBudgetS));
  return v;
}

Verdict intersection_shrinkage() {
  Verdict v;
  constexpr std::uint64_t kTrials = 400;
  const auto r = cmd_attack(params(16, 8), parse_policy_cycle("alternate"), 2, kTrials, kRootSeed + 4);
  tally(r);
  survival_check(v, r, std::pow(0.75, 16.0), "2 sessions d=8");
  const auto& g = r.group("attack");
  v.require(*g.monotonicity_violations == 0,
            fmt("monotone %llu/%llu", (unsigned long long)(kTrials - *g.monotonicity_violations),
                (unsigned long long)kTrials));
  return v;
}

Verdict accept_rate(const char* label, const SessionParams& p, bool equal_keys,
                    const std::optional<AdversaryStrategy>& eve, std::uint64_t n, double expect,
                    std::uint64_t seed) {
  const auto recs = run_trials(n, [&](std::uint64_t i) {
    Rng rng = trial_rng(seed, i);
    Rng key_rng = rng.stream("keys");
    const Key ka = random_key(key_rng, p.key_len);
    Key kb = equal_keys ? ka : random_key(key_rng, p.key_len);
    if (!equal_keys && kb == ka) kb.bits.set(0, !kb.bits[0]);
    TrialRecord r;
    r.accepted = run_session(ka, kb, p, eve, rng.stream("session")).outcome == Outcome::Accept;
    return r;
  });
  std::uint64_t accepted = 0;
  for (const auto& r : recs) accepted += *r.accepted;
  const double rate = double(accepted) / double(n);
  const double sigma = oracle::binomial_sigma(expect, double(n));
  Verdict v;
  v.require(within(rate, expect, sigma),
            fmt("%s rate=%.5f (target %.5f, 4sigma %.5f, n=%llu)", label, rate, expect,
                kSigmas * sigma, (unsigned long long)n));
  return v;
}

Verdict replay() {
  Verdict v;
  constexpr std::uint64_t kTrials = 10000;
  const auto alice = cmd_replay(params(16, 16, Variant::ZawadzkiAliceNonce), kTrials, kRootSeed + 7);
  v.require(*alice.group("replay").accept_rate == 1.0,
            fmt("alice-nonce replay %.4f", *alice.group("replay").accept_rate));

  constexpr std::uint64_t kBobTrials = 40000;
  constexpr std::size_t kD = 4;
  const auto bob = cmd_replay(params(16, kD, Variant::ZawadzkiBobNonce), kBobTrials, kRootSeed + 8);
  const double expect = std::pow(0.5, double(kD));
  const double rate = *bob.group("replay").accept_rate;
  const double sigma = oracle::binomial_sigma(expect, double(kBobTrials));
  v.require(within(rate, expect, sigma),
            fmt("bob-nonce replay d=%zu %.5f (target %.5f, 4sigma %.5f)", kD, rate, expect, kSigmas * sigma));

  for (auto variant : kVariants) {
    const auto r = cmd_replay(params(16, 16, variant), kTrials, kRootSeed + 9);
    v.require(*r.group("live_relay").accept_rate == 1.0,
              fmt("live relay %s %.4f", std::string(variant_name(variant)).c_str(),
                  *r.group("live_relay").accept_rate));
  }
  return v;
}

Verdict hong_transfer() {
  Verdict v;
  auto p = params(12, 16, Variant::HongDecoy);
  p.decoy_prob = 0.5;
  const auto r = cmd_attack(p, {BasisPolicy::all_rectilinear()}, 1, 200, kRootSeed + 16);
  tally(r);
  survival_check(v, r, std::pow(0.75, 16.0), "hong d=16");
  return v;
}

Verdict hash_family() {
  Verdict v;
  constexpr std::uint64_t kPairs = 100000;
  Rng rng(kRootSeed + 9);
  std::uint64_t violations = 0;
  for (std::uint64_t i = 0; i < kPairs; ++i) {
    const std::size_t n = 1 + rng.below(160);
    const std::size_t d = 1 + rng.below(40);
    const auto h = sample_hash(rng, n, d);
    const auto x = random_bits(rng, n);
    const auto y = random_bits(rng, n);
    // Affine: H(x) ^ H(y) == H(x ^ y) ^ H(0).
    if ((h.eval(x) ^ h.eval(y)) != (h.eval(x ^ y) ^ h.eval(BitString(n)))) ++violations;
  }
  v.require(violations == 0, fmt("affinity violations %llu/%llu", (unsigned long long)violations,
                                 (unsigned long long)kPairs));

  constexpr std::uint64_t kFunctions = 100000;
  constexpr std::size_t kD = 4;
  constexpr std::size_t kN = 64;
  const auto x = random_bits(rng, kN);
  auto y = random_bits(rng, kN);
  if (y == x) y.set(0, !y[0]);
  std::uint64_t collisions = 0;
  for (std::uint64_t i = 0; i < kFunctions; ++i) {
    const auto h = sample_hash(rng, kN, kD);
    collisions += h.eval(x) == h.eval(y);
  }
  const double expect = std::pow(2.0, -2.0 * kD);
  const double rate = double(collisions) / double(kFunctions);
  const double sigma = oracle::binomial_sigma(expect, double(kFunctions));
  v.require(within(rate, expect, sigma),
            fmt("collision rate d=4 %.6f (target %.6f, 4sigma %.6f)", rate, expect, kSigmas * sigma));
  return v;
}

Verdict transport_equivalence() {
  constexpr std::uint64_t kSessions = 100;
  Verdict v;
  std::uint64_t identical = 0;
  std::string first_error;
  try {
    TcpListener bob_listener("127.0.0.1", 0);
    TcpListener eve_listener("127.0.0.1", 0);
    for (std::uint64_t i = 0; i < kSessions; ++i) {
      const auto p = params(16, 8 + i % 9, kVariants[i % 3]);
      const Rng rng = trial_rng(kRootSeed + 10, i);
      Rng key_rng = rng.stream("keys");
      const Key ka = random_key(key_rng, p.key_len);
      const Key kb = i % 4 == 3 ? random_key(key_rng, p.key_len) : ka;
      const auto strategy = AdversaryStrategy::transparent();

      harness::WireLogs logs;
      std::thread bob([&] {
        TcpStream s = bob_listener.accept();
        FrameChannel ch(s);
        logs.verifier = run_bob(ch, kb, p, rng);
      });
      std::thread eve([&] {
        TcpStream up = eve_listener.accept();
        TcpStream down = TcpStream::connect("127.0.0.1", bob_listener.port());
        logs.adversary = proxy_session(up, down, strategy, rng);
      });
      {
        TcpStream s = TcpStream::connect("127.0.0.1", eve_listener.port());
        FrameChannel ch(s);
        logs.prover = run_alice(ch, ka, p, rng);
      }
      bob.join();
      eve.join();
      const auto wire = logs.transcript(p, rng);
      const auto local = run_session(ka, kb, p, strategy, rng);
      if (wire == local) ++identical;
    }
  } catch (const std::exception& e) {
    first_error = e.what();
  }
  v.require(identical == kSessions && first_error.empty(),
            fmt("%llu/%llu event-identical%s", (unsigned long long)identical,
                (unsigned long long)kSessions, first_error.empty() ? "" : " (transport error)"));
  if (!first_error.empty()) v.detail += ": " + first_error;
  return v;
}

// The set S displayed for an all-rectilinear attack, 1-based:
// S = { s : h_{2i} = M_i and h_{2i-1} = 0 for all i <= d }.
std::vector<std::uint64_t> displayed_s(const HashFunction& h, const Nonce& r, std::size_t key_len,
                                       const std::vector<int>& m) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << key_len); ++s) {
    const auto hs = oracle::hash_key(h, r.bits, s, key_len);
    bool member = true;
    for (std::size_t i = 1; i <= m.size(); ++i) {
      member = member && hs[2 * i - 1] == m[i - 1] && hs[2 * i - 2] == 0;
    }
    if (member) out.push_back(s);
  }
  return out;
}

Verdict likelihood_consistency() {
  constexpr std::size_t kKeyLen = 8;
  constexpr std::uint64_t kSeeds = 50;
  Verdict v;
  std::uint64_t mismatched_scores = 0, mismatched_strata = 0, candidates = 0;
  const auto ks = KeySpace::exhaustive(kKeyLen);
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    Rng rng = trial_rng(kRootSeed + 11, seed);
    Rng key_rng = rng.stream("keys");
    const auto p = params(kKeyLen, 2 + seed % 7);
    const Key k = random_key(key_rng, kKeyLen);

    // Mixed-policy sessions for the score comparison.
    std::vector<SessionObservations> sessions;
    const std::vector<BasisPolicy> policies{BasisPolicy::all_rectilinear(), BasisPolicy::uniform_random(),
                                            BasisPolicy::all_diagonal()};
    for (std::size_t s = 0; s < 1 + seed % 3; ++s) {
      const auto t = run_session(k, k, p, AdversaryStrategy::intercept(policies[s]), rng.stream(s));
      sessions.push_back({t.hash(), t.nonce, extract_observations(t)});
    }
    const auto scores = likelihood_score(ks, sessions);
    for (const auto& sk : scores) {
      double prob = 1.0;
      for (const auto& s : sessions) {
        const auto hv = oracle::hash_key(s.hash, s.nonce.bits, sk.key, kKeyLen);
        for (const auto& o : s.observations) {
          prob *= oracle::outcome_probability(hv[2 * o.qubit_index], hv[2 * o.qubit_index + 1],
                                              basis_bit(o.meas_basis), o.outcome);
        }
      }
      ++candidates;
      mismatched_scores += sk.log2_likelihood != oracle::log2_or_ninf(prob);
    }

    // A single all-rectilinear session for the stratum comparison.
    const auto t = run_session(k, k, p, AdversaryStrategy::intercept(BasisPolicy::all_rectilinear()),
                               rng.stream("rect"));
    const auto obs = extract_observations(t);
    std::vector<int> m(p.d);
    for (const auto& o : obs) m[o.qubit_index] = o.outcome;
    const std::vector<SessionObservations> rect{{t.hash(), t.nonce, obs}};
    const auto stratum = likelihood_one_stratum(likelihood_score(ks, rect));
    mismatched_strata += stratum != displayed_s(t.hash(), t.nonce, kKeyLen, m);
  }
  v.require(mismatched_scores == 0, fmt("score mismatches %llu/%llu candidates",
                                        (unsigned long long)mismatched_scores, (unsigned long long)candidates));
  v.require(mismatched_strata == 0, fmt("stratum != displayed S in %llu/%llu seeds",
                                        (unsigned long long)mismatched_strata, (unsigned long long)kSeeds));
  return v;
}

Verdict elimination_soundness() {
  // A policy and variant sweep on top of the attacks already run above.
  for (auto variant : kVariants) {
    for (const char* policy : {"rect", "diag", "random", "alternate", "0110"}) {
      auto p = params(12, 4, variant);
      tally(cmd_attack(p, parse_policy_cycle(policy), 3, 50, kRootSeed + 3));
    }
  }
  Verdict v;
  v.require(g_containment_violations == 0,
            fmt("containment violations %llu over %llu attack trials",
                (unsigned long long)g_containment_violations, (unsigned long long)g_containment_trials));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "completeness", completeness},
      {2, "survival law", survival_law},
      {4, "intersection shrinkage", intersection_shrinkage},
      {5, "false-accept rate",
       [] {
         return accept_rate("unequal keys d=4", params(16, 4), false, std::nullopt, 100000, 0.0625,
                            kRootSeed + 5);
       }},
      {6, "eavesdropper disturbance",
       [] {
         return accept_rate("random-basis intercept d=8", params(16, 8), true,
                            AdversaryStrategy::intercept(BasisPolicy::uniform_random()), 100000,
                            std::pow(0.75, 8.0), kRootSeed + 6);
       }},
      {7, "replay", replay},
      {8, "hong variant transfer", hong_transfer},
      {9, "hash family", hash_family},
      {10, "transport equivalence", transport_equivalence},
      {11, "likelihood consistency", likelihood_consistency},
      {3, "elimination soundness", elimination_soundness},
  };

  std::vector<std::pair<const Criterion*, Verdict>> results;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    results.emplace_back(&c, v);
  }
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
  int failures = 0;
  for (const auto& [c, v] : results) {
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", c->id, c->name, v.detail.c_str());
    failures += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}
