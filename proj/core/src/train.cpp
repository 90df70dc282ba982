#include "draftlab/train.hpp"

#include <cmath>
#include <sstream>

#include "draftlab/errors.hpp"
#include "draftlab/evaluators.hpp"
#include "draftlab/gradients.hpp"
#include "draftlab/judge.hpp"
#include "draftlab/offpolicy.hpp"

namespace draftlab::lab {

namespace {

using advantage::AdvantageSet;
using advantage::MaskMode;
using advantage::RewardGroup;

double mean_entropy(const policy::TabularPolicy& policy, const std::vector<StepRecord>& steps) {
  if (steps.empty()) return 0.0;
  double h = 0.0;
  for (const auto& step : steps) h += policy.entropy(step.state);
  return h / static_cast<double>(steps.size());
}

TrainingLogEntry log_step(int step, double objective, const policy::TabularPolicy& policy,
                          const RolloutGroup& batch) {
  TrainingLogEntry entry;
  entry.step = step;
  entry.objective = objective;

  const auto& trajs = batch.trajectories;
  const double n = static_cast<double>(trajs.size());
  double reward_sum = 0.0;
  double turn_sum = 0.0;
  double repetition_sum = 0.0;
  double h_correct = 0.0, h_wrong = 0.0;
  int n_correct = 0, n_wrong = 0;
  double h_draft = 0.0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    reward_sum += batch.rewards.solution_rewards[i];
    turn_sum += trajs[i].turn_count();
    std::vector<ActionRecord> actions;
    actions.reserve(trajs[i].turns.size());
    for (const auto& turn : trajs[i].turns) actions.push_back(turn.action);
    repetition_sum += probes::repetition_score(actions);
    h_draft += mean_entropy(policy, trajs[i].draft_steps);
    const double h_exec = mean_entropy(policy, trajs[i].exec_steps);
    if (batch.rewards.solution_rewards[i] == 1.0) {
      h_correct += h_exec;
      ++n_correct;
    } else {
      h_wrong += h_exec;
      ++n_wrong;
    }
  }
  entry.mean_solution_reward = reward_sum / n;
  entry.mean_turns = turn_sum / n;
  entry.valid_answer_rate = probes::valid_answer_rate(trajs);
  entry.draft_entropy = h_draft / n;
  entry.solution_entropy_correct = n_correct > 0 ? h_correct / n_correct : 0.0;
  entry.solution_entropy_wrong = n_wrong > 0 ? h_wrong / n_wrong : 0.0;
  entry.repetition_score = repetition_sum / n;
  return entry;
}

/// Gradient of the clipped objective at the current policy, with old
/// log-probabilities frozen from the rollout.
policy::ParamTable clipped_gradient(const policy::TabularPolicy& policy,
                                    const std::vector<Trajectory>& trajs,
                                    const RewardGroup& rewards, const AdvantageSet& adv,
                                    double eps_low, double eps_high) {
  auto grad = policy::zero_like(policy);
  const double group = static_cast<double>(trajs.size());
  const double lo = 1.0 - eps_low;
  const double hi = 1.0 + eps_high;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const double len = static_cast<double>(rewards.total_length(i));
    auto token = [&](const StepRecord& step, double a) {
      const double ratio = std::exp(policy.log_prob(step.state, step.action) - step.logprob);
      const double clipped = std::min(std::max(ratio, lo), hi);
      // min selects the unclipped branch: gradient flows; otherwise constant.
      if (ratio * a <= clipped * a) {
        accumulate_score_gradient(policy, step.state, step.action, ratio * a / (len * group),
                                  grad);
      }
    };
    for (const auto& step : trajs[i].draft_steps) token(step, adv.draft_advantages[i]);
    for (const auto& step : trajs[i].exec_steps) token(step, adv.solution_advantages[i]);
  }
  return grad;
}

offpolicy::TokenLogProbs stored_logprobs(const std::vector<Trajectory>& trajs) {
  offpolicy::TokenLogProbs out;
  out.reserve(trajs.size());
  for (const auto& traj : trajs) {
    std::vector<double> lp;
    lp.reserve(traj.draft_steps.size() + traj.exec_steps.size());
    for (const auto& step : traj.draft_steps) lp.push_back(step.logprob);
    for (const auto& step : traj.exec_steps) lp.push_back(step.logprob);
    out.push_back(std::move(lp));
  }
  return out;
}

offpolicy::TokenLogProbs current_logprobs(const policy::TabularPolicy& policy,
                                          const std::vector<Trajectory>& trajs) {
  offpolicy::TokenLogProbs out;
  out.reserve(trajs.size());
  for (const auto& traj : trajs) {
    std::vector<double> lp;
    lp.reserve(traj.draft_steps.size() + traj.exec_steps.size());
    for (const auto& step : traj.draft_steps) lp.push_back(policy.log_prob(step.state, step.action));
    for (const auto& step : traj.exec_steps) lp.push_back(policy.log_prob(step.state, step.action));
    out.push_back(std::move(lp));
  }
  return out;
}

}  // namespace

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "dfpo") return Algorithm::Dfpo;
  if (name == "mgrpo") return Algorithm::Mgrpo;
  if (name == "dfpo-off-clipped") return Algorithm::DfpoOffClipped;
  throw ConfigError("unknown algorithm: " + name);
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Dfpo: return "dfpo";
    case Algorithm::Mgrpo: return "mgrpo";
    default: return "dfpo-off-clipped";
  }
}

nlohmann::json TrainingLog::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    arr.push_back({{"step", e.step},
                   {"objective", e.objective},
                   {"mean_solution_reward", e.mean_solution_reward},
                   {"mean_turns", e.mean_turns},
                   {"valid_answer_rate", e.valid_answer_rate},
                   {"draft_entropy", e.draft_entropy},
                   {"solution_entropy_correct", e.solution_entropy_correct},
                   {"solution_entropy_wrong", e.solution_entropy_wrong},
                   {"repetition_score", e.repetition_score}});
  }
  return arr;
}

std::string TrainingLog::to_tsv() const {
  std::ostringstream out;
  out << "step\tobjective\tmean_solution_reward\tmean_turns\tvalid_answer_rate\t"
         "draft_entropy\tsolution_entropy_correct\tsolution_entropy_wrong\trepetition_score\n";
  out.precision(10);
  for (const auto& e : entries) {
    out << e.step << '\t' << e.objective << '\t' << e.mean_solution_reward << '\t'
        << e.mean_turns << '\t' << e.valid_answer_rate << '\t' << e.draft_entropy << '\t'
        << e.solution_entropy_correct << '\t' << e.solution_entropy_wrong << '\t'
        << e.repetition_score << '\n';
  }
  return out.str();
}

TrainResult train(Algorithm algorithm, const DraftWorldConfig& config,
                  const policy::TabularPolicy& initial, const TrainOptions& options) {
  config.validate();
  if (options.steps < 0) throw DomainError("steps must be nonnegative");
  if (options.learning_rate < 0.0) throw DomainError("learning rate must be nonnegative");

  TrainResult result{initial, {}};
  result.log.entries.reserve(static_cast<std::size_t>(options.steps));

  for (int step = 0; step < options.steps; ++step) {
    const auto batch = rollout_group(config, result.policy, options.group_size,
                                     derive_seed(options.seed, static_cast<std::uint64_t>(step)));
    const auto& rewards = batch.rewards;

    // Entropies describe the behavior policy the batch was sampled from.
    TrainingLogEntry entry = log_step(step, 0.0, result.policy, batch);

    const MaskMode mode = options.negative_sample_masking ? MaskMode::Masked : MaskMode::Unmasked;
    double objective = 0.0;

    switch (algorithm) {
      case Algorithm::Dfpo: {
        const AdvantageSet adv = advantage::compute_advantages(rewards, mode);
        objective = advantage::dfpo_objective(rewards, adv);
        const auto grad = dfpo_gradient(result.policy, batch.trajectories, rewards, adv);
        result.policy.apply(grad, options.learning_rate);
        break;
      }
      case Algorithm::Mgrpo: {
        const auto solution_adv = advantage::group_normalize(rewards.solution_rewards);
        objective = advantage::mgrpo_objective(rewards, solution_adv, 0.0);
        const auto grad = mgrpo_gradient(result.policy, batch.trajectories, rewards, solution_adv);
        result.policy.apply(grad, options.learning_rate);
        break;
      }
      case Algorithm::DfpoOffClipped: {
        const AdvantageSet adv = advantage::compute_advantages(rewards, mode);
        const auto old_lp = stored_logprobs(batch.trajectories);
        for (int epoch = 0; epoch < options.off_policy_epochs; ++epoch) {
          const auto grad = clipped_gradient(result.policy, batch.trajectories, rewards, adv,
                                             options.eps_low, options.eps_high);
          result.policy.apply(grad, options.learning_rate);
        }
        objective = offpolicy::clipped_objective(rewards,
                                                 current_logprobs(result.policy,
                                                                  batch.trajectories),
                                                 old_lp, adv, options.eps_low, options.eps_high);
        break;
      }
    }

    if (!result.policy.finite()) {
      throw DivergenceError("non-finite parameters after step " + std::to_string(step) +
                            " of " + to_string(algorithm));
    }
    entry.objective = objective;
    result.log.entries.push_back(entry);
  }
  return result;
}

probes::EfficiencyReport evaluate_policy(const DraftWorldConfig& config,
                                         const policy::TabularPolicy& policy, int episodes,
                                         std::uint64_t seed) {
  config.validate();
  if (episodes < 1) throw DomainError("evaluation needs at least one episode");

  int answer_location = config.answer_location;
  if (answer_location < 0) {
    Rng env_rng(derive_seed(seed, 0));
    answer_location = env_rng.uniform_int(0, config.n_locations - 1);
  }

  router::EvalSpec match;
  match.kind = router::EvalKind::StringExactMatch;
  router::StubJudgeClient stub;
  const AnswerValue golden = config.golden_answer(answer_location);

  std::vector<Trajectory> trajectories;
  std::vector<double> rewards;
  trajectories.reserve(static_cast<std::size_t>(episodes));
  for (int i = 0; i < episodes; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
    trajectories.push_back(rollout(config, policy, rng, answer_location));
    const auto& traj = trajectories.back();
    double r = 0.0;
    if (traj.terminal && traj.answer.is_string()) {
      r = router::evaluate(match, traj.answer, golden, stub).binary;
    }
    rewards.push_back(r);
  }
  return probes::efficiency_report(trajectories, rewards, config.max_turns);
}

}  // namespace draftlab::lab
