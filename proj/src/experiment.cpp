#include "qia/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "qia/errors.hpp"
#include "qia/keyspace.hpp"

namespace qia {

using nlohmann::json;

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double std_error() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Key unequal_key(Rng& rng, const Key& other) {
  Key k = random_key(rng, other.size());
  if (k == other) k.bits.set(k.size() - 1, !k.bits[k.size() - 1]);
  return k;
}

}  // namespace

const GroupAggregate& ExperimentReport::group(const std::string& name) const {
  auto it = groups.find(name);
  if (it == groups.end()) throw InputError("report has no group '" + name + "'");
  return it->second;
}

std::map<std::string, GroupAggregate> aggregate(const std::vector<TrialRecord>& records) {
  struct Acc {
    std::uint64_t trials = 0;
    Moments accept, survival, nontrue;
    std::vector<Moments> factors;
    std::optional<std::uint64_t> containment, monotone;
  };
  std::map<std::string, Acc> acc;
  for (const auto& r : records) {
    auto& a = acc[r.group];
    ++a.trials;
    if (r.accepted) a.accept.add(*r.accepted ? 1.0 : 0.0);
    if (r.survival_fraction) a.survival.add(*r.survival_fraction);
    if (r.nontrue_fraction) a.nontrue.add(*r.nontrue_fraction);
    if (a.factors.size() < r.session_fractions.size()) a.factors.resize(r.session_fractions.size());
    double prev = 1.0;
    for (std::size_t s = 0; s < r.session_fractions.size(); ++s) {
      if (prev > 0.0) a.factors[s].add(r.session_fractions[s] / prev);
      prev = r.session_fractions[s];
    }
    if (r.true_key_contained) a.containment = a.containment.value_or(0) + !*r.true_key_contained;
    if (r.monotone) a.monotone = a.monotone.value_or(0) + !*r.monotone;
  }
  std::map<std::string, GroupAggregate> out;
  for (const auto& [name, a] : acc) {
    GroupAggregate g;
    g.trials = a.trials;
    if (a.accept.n) {
      g.accept_rate = a.accept.mean();
      g.accept_std_error = a.accept.std_error();
    }
    if (a.survival.n) {
      g.mean_survival_fraction = a.survival.mean();
      g.survival_std_error = a.survival.std_error();
    }
    if (a.nontrue.n) {
      g.mean_nontrue_fraction = a.nontrue.mean();
      g.nontrue_std_error = a.nontrue.std_error();
    }
    for (const auto& f : a.factors) g.per_session_factors.push_back(f.mean());
    g.containment_violations = a.containment;
    g.monotonicity_violations = a.monotone;
    out.emplace(name, std::move(g));
  }
  return out;
}

std::vector<TrialRecord> run_trials(std::uint64_t n,
                                    const std::function<TrialRecord(std::uint64_t)>& fn,
                                    unsigned workers) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
  std::vector<TrialRecord> out(n);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::uint64_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ExperimentReport cmd_honest(const SessionParams& params, std::uint64_t trials, std::uint64_t seed) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = {{"command", "honest"}, {"params", params_to_json(params)},
                   {"trials", trials}, {"seed", seed}};
  report.records = run_trials(2 * trials, [&](std::uint64_t i) {
    Rng rng = trial_rng(seed, i);
    Rng key_rng = rng.stream("keys");
    const bool equal = i < trials;
    const Key k_a = random_key(key_rng, params.key_len);
    const Key k_b = equal ? k_a : unequal_key(key_rng, k_a);
    const Transcript t = run_session(k_a, k_b, params, std::nullopt, rng.stream("session"));
    TrialRecord r;
    r.trial = i;
    r.group = equal ? "equal_keys" : "unequal_keys";
    r.accepted = t.outcome == Outcome::Accept;
    return r;
  });
  report.groups = aggregate(report.records);
  report.wall_time_s = elapsed_since(start);
  return report;
}

std::vector<BasisPolicy> parse_policy_cycle(const std::string& text) {
  if (text == "alternate") return {BasisPolicy::all_rectilinear(), BasisPolicy::all_diagonal()};
  std::vector<BasisPolicy> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(BasisPolicy::parse(item));
  if (out.empty()) throw InputError("empty basis policy");
  return out;
}

ExperimentReport cmd_attack(const SessionParams& params, const std::vector<BasisPolicy>& policies,
                            std::size_t sessions, std::uint64_t trials, std::uint64_t seed) {
  params.validate();
  if (sessions == 0) throw InputError("at least one session per trial is required");
  if (policies.empty()) throw InputError("at least one basis policy is required");
  for (const auto& p : policies) p.validate(params.d);
  auto keyspace = std::make_shared<const KeySpace>(KeySpace::exhaustive(params.key_len));
  keyspace->check_enumerable();

  json policy_names = json::array();
  for (const auto& p : policies) policy_names.push_back(p.describe());
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = {{"command", "attack"}, {"params", params_to_json(params)},
                   {"policy", policy_names}, {"sessions", sessions},
                   {"trials", trials}, {"seed", seed}};
  const double k_size = static_cast<double>(keyspace->size());

  report.records = run_trials(trials, [&](std::uint64_t i) {
    Rng rng = trial_rng(seed, i);
    Rng key_rng = rng.stream("keys");
    const Key key = random_key(key_rng, params.key_len);
    TrialRecord r;
    r.trial = i;
    r.group = "attack";
    r.monotone = true;
    std::optional<SurvivorSet> running;
    bool contained = true;
    for (std::size_t s = 0; s < sessions; ++s) {
      const auto strategy = AdversaryStrategy::intercept(policies[s % policies.size()]);
      const Transcript t = run_session(key, key, params, strategy, rng.stream("session").stream(s));
      if (s == 0) r.accepted = t.outcome == Outcome::Accept;
      const auto obs = extract_observations(t);
      SurvivorSet survivors = eliminate(keyspace, t.hash(), t.nonce, obs);
      contained = contained && survivors.contains(key.value());
      const auto before = running ? running->size() : keyspace->size();
      running = running ? intersect(*running, survivors) : std::move(survivors);
      contained = contained && running->contains(key.value());
      if (running->size() > before) r.monotone = false;
      r.session_fractions.push_back(survival_fraction(*running));
    }
    r.true_key_contained = contained;
    r.survival_fraction = survival_fraction(*running);
    r.nontrue_fraction = k_size > 1
        ? (static_cast<double>(running->size()) - (running->contains(key.value()) ? 1.0 : 0.0)) /
              (k_size - 1.0)
        : 0.0;
    return r;
  });
  report.groups = aggregate(report.records);
  report.wall_time_s = elapsed_since(start);
  return report;
}

ExperimentReport cmd_replay(const SessionParams& params, std::uint64_t trials, std::uint64_t seed) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = {{"command", "replay"}, {"params", params_to_json(params)},
                   {"trials", trials}, {"seed", seed}};
  report.records = run_trials(2 * trials, [&](std::uint64_t i) {
    Rng rng = trial_rng(seed, i);
    Rng key_rng = rng.stream("keys");
    const Key key = random_key(key_rng, params.key_len);
    TrialRecord r;
    r.trial = i;
    if (i < trials) {
      r.group = "replay";
      Rng alice = rng.stream("alice");
      Rng eve = rng.stream("eve");
      Rng verifier = rng.stream("verifier");
      auto stored = capture_from_alice(key, params, alice, eve);
      r.accepted = replay_attack(params.variant, std::move(stored), key, params, verifier) ==
                   Outcome::Accept;
    } else {
      r.group = "live_relay";
      const Transcript t = run_session(key, key, params, AdversaryStrategy::store_forward(),
                                       rng.stream("session"));
      r.accepted = t.outcome == Outcome::Accept;
    }
    return r;
  });
  report.groups = aggregate(report.records);
  report.wall_time_s = elapsed_since(start);
  return report;
}

// --- Serialization -----------------------------------------------------------

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json group_to_json(const GroupAggregate& g) {
  return {{"trials", g.trials},
          {"accept_rate", opt(g.accept_rate)},
          {"accept_std_error", opt(g.accept_std_error)},
          {"mean_survival_fraction", opt(g.mean_survival_fraction)},
          {"survival_std_error", opt(g.survival_std_error)},
          {"mean_nontrue_fraction", opt(g.mean_nontrue_fraction)},
          {"nontrue_std_error", opt(g.nontrue_std_error)},
          {"per_session_factors", g.per_session_factors},
          {"containment_violations", opt(g.containment_violations)},
          {"monotonicity_violations", opt(g.monotonicity_violations)}};
}

bool close(const std::optional<double>& a, const json& b) {
  if (!a) return b.is_null();
  if (!b.is_number()) return false;
  return std::abs(*a - b.get<double>()) <= 1e-9 * std::max(1.0, std::abs(*a));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError("report schema violation: " + what);
}

}  // namespace

json report_to_json(const ExperimentReport& r) {
  json trials = json::array();
  for (const auto& t : r.records) {
    trials.push_back({{"trial", t.trial},
                      {"group", t.group},
                      {"accepted", opt(t.accepted)},
                      {"survival_fraction", opt(t.survival_fraction)},
                      {"nontrue_fraction", opt(t.nontrue_fraction)},
                      {"session_fractions", t.session_fractions},
                      {"true_key_contained", opt(t.true_key_contained)},
                      {"monotone", opt(t.monotone)}});
  }
  json groups = json::object();
  for (const auto& [name, g] : r.groups) groups[name] = group_to_json(g);
  return {{"schema", kReportSchema},
          {"config", r.config},
          {"trials", std::move(trials)},
          {"aggregates", {{"wall_time_s", r.wall_time_s}, {"groups", std::move(groups)}}}};
}

void validate_report_json(const json& j) {
  require(j.is_object(), "top level must be an object");
  require(j.value("schema", std::string()) == kReportSchema, "schema must be qia-report/1");
  require(j.contains("config") && j.at("config").is_object(), "config object missing");
  require(j.at("config").contains("command") && j.at("config").at("command").is_string(),
          "config.command missing");
  require(j.at("config").contains("seed") && j.at("config").at("seed").is_number_unsigned(),
          "config.seed missing");
  require(j.contains("trials") && j.at("trials").is_array(), "trials array missing");
  for (const auto& t : j.at("trials")) {
    require(t.is_object(), "trial record must be an object");
    require(t.contains("trial") && t.at("trial").is_number_unsigned(), "trial index missing");
    require(t.contains("group") && t.at("group").is_string(), "trial group missing");
    for (const char* k : {"accepted", "true_key_contained", "monotone"}) {
      require(!t.contains(k) || t.at(k).is_null() || t.at(k).is_boolean(),
              std::string(k) + " must be boolean or null");
    }
    for (const char* k : {"survival_fraction", "nontrue_fraction"}) {
      require(!t.contains(k) || t.at(k).is_null() || t.at(k).is_number(),
              std::string(k) + " must be numeric or null");
    }
    require(!t.contains("session_fractions") || t.at("session_fractions").is_array(),
            "session_fractions must be an array");
  }
  require(j.contains("aggregates") && j.at("aggregates").is_object(), "aggregates missing");
  const auto& agg = j.at("aggregates");
  require(agg.contains("wall_time_s") && agg.at("wall_time_s").is_number(), "wall_time_s missing");
  require(agg.contains("groups") && agg.at("groups").is_object(), "aggregates.groups missing");
  for (const auto& [name, g] : agg.at("groups").items()) {
    require(g.contains("trials") && g.at("trials").is_number_unsigned(), name + ".trials missing");
    require(g.contains("per_session_factors") && g.at("per_session_factors").is_array(),
            name + ".per_session_factors missing");
    for (const char* k : {"accept_rate", "mean_survival_fraction", "mean_nontrue_fraction",
                          "accept_std_error", "survival_std_error", "nontrue_std_error"}) {
      require(g.contains(k) && (g.at(k).is_null() || g.at(k).is_number()),
              name + "." + k + " must be numeric or null");
    }
  }
}

ExperimentReport report_from_json(const json& j) {
  validate_report_json(j);
  ExperimentReport r;
  r.config = j.at("config");
  for (const auto& t : j.at("trials")) {
    TrialRecord rec;
    rec.trial = t.at("trial").get<std::uint64_t>();
    rec.group = t.at("group").get<std::string>();
    rec.accepted = opt_from<bool>(t, "accepted");
    rec.survival_fraction = opt_from<double>(t, "survival_fraction");
    rec.nontrue_fraction = opt_from<double>(t, "nontrue_fraction");
    rec.session_fractions = t.value("session_fractions", std::vector<double>{});
    rec.true_key_contained = opt_from<bool>(t, "true_key_contained");
    rec.monotone = opt_from<bool>(t, "monotone");
    r.records.push_back(std::move(rec));
  }
  r.groups = aggregate(r.records);
  r.wall_time_s = j.at("aggregates").at("wall_time_s").get<double>();

  const auto& stored = j.at("aggregates").at("groups");
  require(stored.size() == r.groups.size(), "group set differs from the trial records");
  for (const auto& [name, g] : r.groups) {
    require(stored.contains(name), "group '" + name + "' missing from aggregates");
    const auto& s = stored.at(name);
    const bool consistent =
        s.at("trials").get<std::uint64_t>() == g.trials && close(g.accept_rate, s.at("accept_rate")) &&
        close(g.mean_survival_fraction, s.at("mean_survival_fraction")) &&
        close(g.mean_nontrue_fraction, s.at("mean_nontrue_fraction")) &&
        close(g.survival_std_error, s.at("survival_std_error"));
    if (!consistent) {
      throw InputError("aggregates for group '" + name + "' do not match the trial records");
    }
  }
  return r;
}

void write_report_csv(std::ostream& out, const ExperimentReport& r) {
  auto cell = [&](const auto& v) {
    if (v) out << *v;
  };
  out << "trial,group,accepted,survival_fraction,nontrue_fraction,true_key_contained,monotone,"
         "session_fractions\n";
  out.precision(17);
  for (const auto& t : r.records) {
    out << t.trial << ',' << t.group << ',';
    if (t.accepted) out << int(*t.accepted);
    out << ',';
    cell(t.survival_fraction);
    out << ',';
    cell(t.nontrue_fraction);
    out << ',';
    if (t.true_key_contained) out << int(*t.true_key_contained);
    out << ',';
    if (t.monotone) out << int(*t.monotone);
    out << ',';
    for (std::size_t s = 0; s < t.session_fractions.size(); ++s) {
      if (s) out << ';';
      out << t.session_fractions[s];
    }
    out << '\n';
  }
}

}  // namespace qia
