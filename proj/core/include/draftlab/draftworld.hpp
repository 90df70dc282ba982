#pragma once

/**
 * @file draftworld.hpp
 * @brief Hidden-location search with a plan-token draft phase.
 *
 * One episode: the agent first emits a short draft of plan tokens (one per
 * location cluster; the first token commits it to searching that cluster),
 * then executes turns — probe a cluster member or emit the answer — until it
 * answers or the turn limit truncates the episode. The terminal reward is
 * binary: the emitted answer names the hidden location or it does not.
 *
 * This keeps the structural features the training algorithms care about:
 * a draft that conditions execution, a dense in-[0,1] draft confidence from
 * the draft tokens' log-probabilities, truncation at a turn limit, and
 * verbatim action repetition as the characteristic failure mode.
 *
 * State layout (dense ids for TabularPolicy):
 *   [0, draft_tokens)                draft positions, n_clusters actions each
 *   draft_tokens + 2p + found        execution, conditioned on plan p
 *   draft_tokens + found             execution, conditioning ablated
 * Execution actions: members_per_cluster probes, then the answer action.
 */

#include <string>
#include <vector>

#include "draftlab/action_record.hpp"
#include "draftlab/advantage.hpp"
#include "draftlab/answer_value.hpp"
#include "draftlab/rng.hpp"
#include "draftlab/tabular_policy.hpp"

namespace draftlab::lab {

struct DraftWorldConfig {
  int n_locations = 9;
  int n_clusters = 3;       ///< draft vocabulary size; one plan token per cluster
  int draft_tokens = 1;     ///< draft length; bounded by max_draft_tokens
  int max_draft_tokens = 8;
  int max_turns = 10;       ///< execution turns before truncation
  int answer_location = -1; ///< -1: derived from the rollout seed
  bool draft_conditioning = true;

  void validate() const;
  int members_per_cluster() const { return n_locations / n_clusters; }
  int cluster_of(int location) const { return location / members_per_cluster(); }
  int member_of(int location) const { return location % members_per_cluster(); }

  int state_count() const;
  int draft_state(int position) const { return position; }
  int exec_state(int plan, bool found) const;
  /// Action index of the answer action in execution states.
  int answer_action() const { return members_per_cluster(); }

  /// Policy with this world's state/action layout, all parameters zero.
  policy::TabularPolicy make_policy() const;

  std::string golden_answer(int answer_location_resolved) const;
};

/// One sampled (state, action) with the log-probability it was drawn at.
struct StepRecord {
  int state = 0;
  int action = 0;
  double logprob = 0.0;
};

struct Turn {
  ActionRecord action;
  std::string observation;
};

struct Trajectory {
  std::vector<int> draft_tokens;
  std::vector<double> draft_logprobs;  ///< each <= 0
  std::vector<Turn> turns;
  bool terminal = false;  ///< answer action emitted within the limit
  AnswerValue answer;
  int answer_location = -1;  ///< hidden location this episode was scored against

  std::vector<StepRecord> draft_steps;
  std::vector<StepRecord> exec_steps;

  int turn_count() const { return static_cast<int>(turns.size()); }
};

/// Group of trajectories plus the reward vectors computed from them.
struct RolloutGroup {
  std::vector<Trajectory> trajectories;
  advantage::RewardGroup rewards;
};

/// Samples one episode. Deterministic in (config, policy, seed).
Trajectory rollout(const DraftWorldConfig& config, const policy::TabularPolicy& policy,
                   Rng& rng, int answer_location);

/**
 * Samples a group for one question. The hidden location is shared by the
 * whole group (config.answer_location, or seed-derived when -1); trajectory i
 * draws from an independent stream derived from `seed`. Solution rewards are
 * scored through the reward router's string exact match; draft rewards gate
 * the geometric-mean draft confidence by the solution reward.
 */
RolloutGroup rollout_group(const DraftWorldConfig& config, const policy::TabularPolicy& policy,
                           int group_size, std::uint64_t seed);

/// The scripted searcher: correct plan token, probe the plan's members in
/// order until the hidden location answers, then emit it.
Trajectory expert_demonstration(const DraftWorldConfig& config, int answer_location);

/// Policy whose sampled behavior reproduces the expert demonstration
/// (expert actions carry nearly all probability mass).
policy::TabularPolicy expert_policy(const DraftWorldConfig& config, int answer_location);

}  // namespace draftlab::lab
