#include "draftlab/draftworld.hpp"

#include <algorithm>
#include <cmath>

#include "draftlab/errors.hpp"
#include "draftlab/evaluators.hpp"
#include "draftlab/judge.hpp"

namespace draftlab::lab {

namespace {

draftlab::ActionRecord probe_action(int absolute_location) {
  draftlab::ActionRecord record;
  record.name = "ClassicRetrieve";
  record.parameters = {{"query", "location " + std::to_string(absolute_location)}, {"limit", 1}};
  return record;
}

draftlab::ActionRecord answer_action_record(const AnswerValue& answer) {
  draftlab::ActionRecord record;
  record.name = "GenerateAnswer";
  record.parameters = {{"answer", answer}};
  return record;
}

double clamped_logprob(double lp) { return std::min(lp, 0.0); }

}  // namespace

void DraftWorldConfig::validate() const {
  if (n_locations < 2) throw ConfigError("n_locations must be >= 2");
  if (n_clusters < 2) throw ConfigError("n_clusters must be >= 2");
  if (n_locations % n_clusters != 0) {
    throw ConfigError("n_locations must be divisible by n_clusters");
  }
  if (members_per_cluster() < 1) throw ConfigError("each cluster needs a member");
  if (draft_tokens < 1 || draft_tokens > max_draft_tokens) {
    throw ConfigError("draft_tokens must lie in [1, max_draft_tokens]");
  }
  if (max_turns < 2) throw ConfigError("max_turns must be >= 2");
  if (answer_location != -1 && (answer_location < 0 || answer_location >= n_locations)) {
    throw ConfigError("answer_location out of range");
  }
}

int DraftWorldConfig::state_count() const {
  return draft_tokens + (draft_conditioning ? 2 * n_clusters : 2);
}

int DraftWorldConfig::exec_state(int plan, bool found) const {
  if (draft_conditioning) {
    return draft_tokens + 2 * plan + (found ? 1 : 0);
  }
  return draft_tokens + (found ? 1 : 0);
}

policy::TabularPolicy DraftWorldConfig::make_policy() const {
  validate();
  std::vector<int> actions;
  actions.reserve(static_cast<std::size_t>(state_count()));
  for (int i = 0; i < draft_tokens; ++i) actions.push_back(n_clusters);
  const int exec_states = draft_conditioning ? 2 * n_clusters : 2;
  for (int i = 0; i < exec_states; ++i) actions.push_back(members_per_cluster() + 1);
  return policy::TabularPolicy(std::move(actions));
}

std::string DraftWorldConfig::golden_answer(int answer_location_resolved) const {
  return "location-" + std::to_string(answer_location_resolved);
}

Trajectory rollout(const DraftWorldConfig& config, const policy::TabularPolicy& policy,
                   Rng& rng, int answer_location) {
  Trajectory traj;
  traj.answer_location = answer_location;

  // Draft phase: sample plan tokens; the first commits the cluster.
  for (int pos = 0; pos < config.draft_tokens; ++pos) {
    const int state = config.draft_state(pos);
    const auto probs = policy.distribution(state);
    const int token = rng.categorical(probs);
    const double lp = clamped_logprob(std::log(probs[static_cast<std::size_t>(token)]));
    traj.draft_tokens.push_back(token);
    traj.draft_logprobs.push_back(lp);
    traj.draft_steps.push_back({state, token, lp});
  }
  const int plan = traj.draft_tokens.front();

  // Execution phase.
  bool found = false;
  int found_location = -1;
  int last_probe = -1;
  const int answer_idx = config.answer_action();
  for (int turn = 0; turn < config.max_turns; ++turn) {
    const int state = config.exec_state(plan, found);
    const auto probs = policy.distribution(state);
    const int action = rng.categorical(probs);
    const double lp = clamped_logprob(std::log(probs[static_cast<std::size_t>(action)]));
    traj.exec_steps.push_back({state, action, lp});

    if (action == answer_idx) {
      AnswerValue answer;
      if (found) {
        answer = config.golden_answer(found_location);
      } else if (last_probe >= 0) {
        answer = "location-" + std::to_string(last_probe);
      } else {
        answer = "unknown";
      }
      traj.answer = answer;
      traj.terminal = true;
      traj.turns.push_back({answer_action_record(answer), "done"});
      break;
    }

    const int location = plan * config.members_per_cluster() + action;
    last_probe = location;
    const bool hit = location == answer_location;
    if (hit) {
      found = true;
      found_location = location;
    }
    traj.turns.push_back({probe_action(location), hit ? "hit" : "miss"});
  }

  if (!traj.terminal) {
    traj.answer = "unknown";  // truncated: no answer action within the limit
  }
  return traj;
}

RolloutGroup rollout_group(const DraftWorldConfig& config, const policy::TabularPolicy& policy,
                           int group_size, std::uint64_t seed) {
  config.validate();
  if (group_size < 2) throw DomainError("group_size must be >= 2");

  int answer_location = config.answer_location;
  if (answer_location < 0) {
    Rng env_rng(derive_seed(seed, 0));
    answer_location = env_rng.uniform_int(0, config.n_locations - 1);
  }

  std::vector<Trajectory> trajectories;
  trajectories.reserve(static_cast<std::size_t>(group_size));
  for (int i = 0; i < group_size; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
    trajectories.push_back(rollout(config, policy, rng, answer_location));
  }

  // Score through the router's string exact match, as an external verifier.
  router::EvalSpec match;
  match.kind = router::EvalKind::StringExactMatch;
  router::StubJudgeClient stub;
  const AnswerValue golden = config.golden_answer(answer_location);

  std::vector<double> solution;
  std::vector<double> draft;
  std::vector<int> d_len;
  std::vector<int> y_len;
  for (const auto& traj : trajectories) {
    double r_sol = 0.0;
    if (traj.terminal && traj.answer.is_string()) {
      r_sol = router::evaluate(match, traj.answer, golden, stub).binary;
    }
    const double rho = advantage::rho_from_logprobs(traj.draft_logprobs);
    solution.push_back(r_sol);
    draft.push_back(advantage::draft_reward(rho, r_sol));
    d_len.push_back(static_cast<int>(traj.draft_tokens.size()));
    y_len.push_back(std::max(1, static_cast<int>(traj.exec_steps.size())));
  }

  return RolloutGroup{std::move(trajectories),
                      advantage::RewardGroup(std::move(solution), std::move(draft),
                                             std::move(d_len), std::move(y_len))};
}

Trajectory expert_demonstration(const DraftWorldConfig& config, int answer_location) {
  config.validate();
  if (answer_location < 0 || answer_location >= config.n_locations) {
    throw DomainError("answer_location out of range");
  }
  Trajectory traj;
  traj.answer_location = answer_location;
  const int plan = config.cluster_of(answer_location);
  for (int pos = 0; pos < config.draft_tokens; ++pos) {
    traj.draft_tokens.push_back(plan);
    traj.draft_logprobs.push_back(0.0);
    traj.draft_steps.push_back({config.draft_state(pos), plan, 0.0});
  }
  const int target_member = config.member_of(answer_location);
  for (int member = 0; member <= target_member; ++member) {
    const int location = plan * config.members_per_cluster() + member;
    traj.exec_steps.push_back({config.exec_state(plan, false), member, 0.0});
    traj.turns.push_back({probe_action(location), location == answer_location ? "hit" : "miss"});
  }
  const AnswerValue answer = config.golden_answer(answer_location);
  traj.exec_steps.push_back({config.exec_state(plan, true), config.answer_action(), 0.0});
  traj.turns.push_back({answer_action_record(answer), "done"});
  traj.answer = answer;
  traj.terminal = true;
  return traj;
}

policy::TabularPolicy expert_policy(const DraftWorldConfig& config, int answer_location) {
  auto pol = config.make_policy();
  const Trajectory demo = expert_demonstration(config, answer_location);
  constexpr double kCommit = 30.0;  // softmax mass ~1 on the committed action
  for (const auto& step : demo.draft_steps) {
    pol.set_parameter(step.state, step.action, kCommit);
  }
  // The demonstration probes several members from the same not-found state;
  // commit that state to the member that actually hits, and keep the answer
  // action committed from the found state.
  const int plan = config.cluster_of(answer_location);
  pol.set_parameter(config.exec_state(plan, false), config.member_of(answer_location), kCommit);
  pol.set_parameter(config.exec_state(plan, true), config.answer_action(), kCommit);
  return pol;
}

}  // namespace draftlab::lab
