#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qia/adversary.hpp"
#include "qia/protocol.hpp"
#include "qia/session.hpp"

namespace qia {

inline constexpr const char* kReportSchema = "qia-report/1";

/// RNG for trial (or wire session) `index` under root `seed`.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index) { return Rng(seed).stream(index); }

struct TrialRecord {
  std::uint64_t trial = 0;
  std::string group;
  std::optional<bool> accepted;
  std::optional<double> survival_fraction;  // |S| / |K| after all sessions
  std::optional<double> nontrue_fraction;   // (|S| - 1) / (|K| - 1): surviving wrong keys
  std::vector<double> session_fractions;    // running |S| / |K| after each session
  std::optional<bool> true_key_contained;  // in every per-session set and every intersection
  std::optional<bool> monotone;

  bool operator==(const TrialRecord&) const = default;
};

struct GroupAggregate {
  std::uint64_t trials = 0;
  std::optional<double> accept_rate;
  std::optional<double> accept_std_error;
  std::optional<double> mean_survival_fraction;
  std::optional<double> survival_std_error;
  std::optional<double> mean_nontrue_fraction;
  std::optional<double> nontrue_std_error;
  std::vector<double> per_session_factors;  // mean of fraction_s / fraction_{s-1}
  std::optional<std::uint64_t> containment_violations;
  std::optional<std::uint64_t> monotonicity_violations;
};

struct ExperimentReport {
  nlohmann::json config;
  std::vector<TrialRecord> records;
  std::map<std::string, GroupAggregate> groups;
  double wall_time_s = 0.0;

  const GroupAggregate& group(const std::string& name) const;
};

/// Recomputes group aggregates from per-trial records.
std::map<std::string, GroupAggregate> aggregate(const std::vector<TrialRecord>& records);

/// Runs fn(i) for i in [0, n) on a worker pool and returns the results in index order.
std::vector<TrialRecord> run_trials(std::uint64_t n,
                                    const std::function<TrialRecord(std::uint64_t)>& fn,
                                    unsigned workers = 0);

/// Honest runs: groups "equal_keys" and "unequal_keys", `trials` each.
ExperimentReport cmd_honest(const SessionParams& params, std::uint64_t trials, std::uint64_t seed);

/// Intercept-and-eliminate: each trial runs `sessions` intercepted sessions against a
/// uniformly random true key and intersects the survivor sets. `policies` cycles per
/// session. Group "attack".
ExperimentReport cmd_attack(const SessionParams& params, const std::vector<BasisPolicy>& policies,
                            std::size_t sessions, std::uint64_t trials, std::uint64_t seed);

/// Replay forgery from quantum memory (group "replay") and live store-and-forward
/// relay (group "live_relay"), `trials` each.
ExperimentReport cmd_replay(const SessionParams& params, std::uint64_t trials, std::uint64_t seed);

/// "rect", "diag", "random", a 0/1 pattern, "alternate" (rect,diag) or a comma list.
std::vector<BasisPolicy> parse_policy_cycle(const std::string& text);

nlohmann::json report_to_json(const ExperimentReport& r);
/// Validates the schema, then checks the stored aggregates against recomputed ones.
/// Throws InputError on any mismatch.
ExperimentReport report_from_json(const nlohmann::json& j);
/// Throws InputError naming the first schema violation.
void validate_report_json(const nlohmann::json& j);

/// Columns: trial,group,accepted,survival_fraction,nontrue_fraction,
///          true_key_contained,monotone,session_fractions (';'-separated)
void write_report_csv(std::ostream& out, const ExperimentReport& r);

}  // namespace qia
