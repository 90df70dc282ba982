#pragma once

/**
 * @file metrics.hpp
 * @brief Efficiency and diagnostic metrics over agent trajectories.
 */

#include <map>
#include <vector>

#include "draftlab/action_record.hpp"
#include "draftlab/draftworld.hpp"

namespace draftlab::probes {

/**
 * Efficiency-weighted score: avg * sqrt(1 − mean_turns/max_turns).
 * avg rides a 0-100 scale. Equals avg at zero turns and 0 at saturation,
 * exactly. Arguments outside their domain raise DomainError.
 */
double i_avg(double avg, double mean_turns, int max_turns);

/**
 * Repetition penalty of one trajectory's actions: −0.1 * (largest count of
 * an exactly repeated action − 1). Actions repeat only when name and
 * canonicalized parameters are identical; varying a parameter starts a new
 * group. Empty input raises DomainError.
 */
double repetition_score(const std::vector<ActionRecord>& actions);

/// Fraction of trajectories that emitted the answer action within the limit.
double valid_answer_rate(const std::vector<lab::Trajectory>& trajectories);

/// Aggregate efficiency metrics of a trajectory batch.
struct EfficiencyReport {
  double avg = 0.0;               ///< task score, 0-100
  double mean_turns = 0.0;
  int max_turns = 0;
  double i_avg = 0.0;
  double valid_answer_rate = 0.0;
  std::map<int, int> turn_histogram;  ///< turn value -> trajectory count

  nlohmann::json to_json() const;
};

/// Report over rollout trajectories scored by their group's solution rewards.
EfficiencyReport efficiency_report(const std::vector<lab::Trajectory>& trajectories,
                                   const std::vector<double>& solution_rewards, int max_turns);

}  // namespace draftlab::probes
