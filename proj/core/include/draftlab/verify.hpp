#pragma once

/**
 * @file verify.hpp
 * @brief The Monte-Carlo property battery behind the verify command.
 *
 * Each check sweeps randomized inputs against one proved property and counts
 * violations. Trials draw from independent streams derived from the root
 * seed, so results do not depend on how trials are sharded across threads
 * and reports reproduce byte for byte.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "draftlab/advantage.hpp"
#include "draftlab/config.hpp"
#include "draftlab/rng.hpp"

namespace draftlab::verify {

struct CheckResult {
  std::string name;
  long trials = 0;
  long violations = 0;
  double worst_residual = 0.0;  ///< per-check meaning, documented in details
  double elapsed_ms = 0.0;
  bool pass = false;
  nlohmann::json details;

  nlohmann::json to_json() const;
};

struct BatterySummary {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  long total_trials() const;
  nlohmann::json to_json() const;
};

/// Random mixed reward group (>= 1 success and >= 1 failure); successful
/// trajectories draw a uniform dense draft reward, failures are zero.
advantage::RewardGroup random_mixed_group(Rng& rng, int group_min, int group_max);

/// Random valid group with any success count (0..G allowed).
advantage::RewardGroup random_any_group(Rng& rng, int group_min, int group_max);

CheckResult check_relative_advantage_suite(const config::VerifyConfig& cfg);
CheckResult check_cv_inequality(const config::VerifyConfig& cfg);
CheckResult check_variance_bound(const config::VerifyConfig& cfg);
CheckResult check_decomposition(const config::VerifyConfig& cfg);
CheckResult check_policy_updates(const config::VerifyConfig& cfg);
CheckResult check_entropy_order(const config::VerifyConfig& cfg);
CheckResult check_surrogate_gap(const config::VerifyConfig& cfg);

/// Runs all checks in battery order.
BatterySummary run_battery(const config::VerifyConfig& cfg);

}  // namespace draftlab::verify
