#pragma once

/**
 * @file config.hpp
 * @brief Typed command configurations with JSON loading and resolved dumps.
 *
 * Every command hashes its *resolved* configuration (defaults applied, CLI
 * overrides folded in) into the report payload, so two runs compare
 * configurations by hash alone.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "draftlab/bandit.hpp"
#include "draftlab/draftworld.hpp"
#include "draftlab/imitation.hpp"
#include "draftlab/judge.hpp"
#include "draftlab/train.hpp"

namespace draftlab::config {

/// Loads a JSON document from disk; ConfigError on I/O or parse failure.
nlohmann::json load_json_file(const std::string& path);

/// Monte-Carlo battery settings (the verify command).
struct VerifyConfig {
  std::uint64_t seed = 20260811;
  int relative_advantage_trials = 100000;
  int cv_trials = 100000;
  int variance_trials = 100000;
  int surrogate_trials = 10000;
  int decomposition_groups = 100;
  int update_trials = 10000;
  int entropy_states = 1000;
  int group_min = 2;
  int group_max = 16;
  double eps = 0.2;
  int threads = 0;  ///< 0: hardware concurrency
  /// Test fixture: "none" or "relative-advantage-part1" (breaks the draft advantage
  /// rule on failed trajectories so Part 1 must trip).
  std::string fault_injection = "none";

  static VerifyConfig from_json(const nlohmann::json& j);
  nlohmann::json resolved() const;
};

struct TrainConfig {
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::string> arms = {"dfpo", "mgrpo"};
  lab::DraftWorldConfig env;
  lab::TrainOptions options;
  lab::ImitationOptions imitation;
  int expert_count = 4;
  /// Hidden locations the demonstrations are drawn for, round-robin; empty
  /// means the environment's own answer location. A mix that disagrees with
  /// the task question leaves genuine draft signal for the RL stage.
  std::vector<int> expert_locations;
  int eval_episodes = 256;
  std::uint64_t eval_seed = 9090;

  static TrainConfig from_json(const nlohmann::json& j);
  nlohmann::json resolved() const;
};

struct ProbeConfig {
  probes::ProbeOptions options;
  std::string agent = "exact-ucb";  ///< exact-ucb | noisy-knowing | greedy-doing | replay
  double noise_sigma = 0.5;
  std::string transcript;           ///< replay agent's JSONL transcript path

  static ProbeConfig from_json(const nlohmann::json& j);
  nlohmann::json resolved() const;
};

struct EvalConfig {
  int max_turns = 10;
  double threshold = 0.5;
  bool stub_judge = true;
  std::uint64_t stub_seed = 0;
  std::optional<nlohmann::json> routes;  ///< route table document; builtin if absent
  router::JudgeEndpointConfig judge;

  static EvalConfig from_json(const nlohmann::json& j);
  nlohmann::json resolved() const;
};

}  // namespace draftlab::config
