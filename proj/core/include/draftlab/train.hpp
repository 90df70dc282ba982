#pragma once

/**
 * @file train.hpp
 * @brief Group-relative policy optimization loops over DraftWorld.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "draftlab/draftworld.hpp"
#include "draftlab/metrics.hpp"
#include "draftlab/tabular_policy.hpp"

namespace draftlab::lab {

enum class Algorithm { Dfpo, Mgrpo, DfpoOffClipped };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algorithm);

struct TrainOptions {
  int steps = 500;
  int group_size = 8;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  bool negative_sample_masking = true;  ///< draft advantage rule for Dfpo arms
  int off_policy_epochs = 4;            ///< inner epochs per batch (clipped arm)
  double eps_low = 0.2;
  double eps_high = 0.2;                ///< raise for the clip-higher setting
};

/// One optimization step's logged metrics.
struct TrainingLogEntry {
  int step = 0;
  double objective = 0.0;
  double mean_solution_reward = 0.0;
  double mean_turns = 0.0;
  double valid_answer_rate = 0.0;
  double draft_entropy = 0.0;             ///< mean policy entropy at visited draft states
  double solution_entropy_correct = 0.0;  ///< successes' execution-state entropy
  double solution_entropy_wrong = 0.0;    ///< failures' execution-state entropy
  double repetition_score = 0.0;          ///< group mean
};

struct TrainingLog {
  std::vector<TrainingLogEntry> entries;
  nlohmann::json to_json() const;
  /// Plain tabular export, one metric per column, header row first.
  std::string to_tsv() const;
};

struct TrainResult {
  policy::TabularPolicy policy;
  TrainingLog log;
};

/**
 * Runs `options.steps` optimization steps of the chosen algorithm from the
 * given policy. Each step draws one rollout group, scores it through the
 * reward router, forms advantages per the algorithm (masking on for the
 * draft/follow arms when enabled), and ascends the analytic gradient.
 * A group with zero successes moves nothing: every advantage is exactly zero.
 * Non-finite parameters abort with DivergenceError naming the failing step.
 */
TrainResult train(Algorithm algorithm, const DraftWorldConfig& config,
                  const policy::TabularPolicy& initial, const TrainOptions& options);

/// Fixed-seed evaluation batch: independent episodes, shared hidden location.
probes::EfficiencyReport evaluate_policy(const DraftWorldConfig& config,
                                         const policy::TabularPolicy& policy, int episodes,
                                         std::uint64_t seed);

}  // namespace draftlab::lab
