#include "draftlab/gradients.hpp"

#include "draftlab/errors.hpp"

namespace draftlab::lab {

void accumulate_score_gradient(const policy::TabularPolicy& policy, int state, int action,
                               double coefficient, policy::ParamTable& into) {
  if (coefficient == 0.0) return;  // keeps no-signal updates bit-exact zeros
  const auto probs = policy.distribution(state);
  auto& row = into[static_cast<std::size_t>(state)];
  for (std::size_t a = 0; a < probs.size(); ++a) {
    const double indicator = static_cast<int>(a) == action ? 1.0 : 0.0;
    row[a] += coefficient * (indicator - probs[a]);
  }
}

policy::ParamTable analytic_segment_gradient(const policy::TabularPolicy& policy,
                                             const std::vector<StepRecord>& segment,
                                             double advantage, double normalizer) {
  if (normalizer <= 0.0) throw DomainError("normalizer must be positive");
  auto grad = policy::zero_like(policy);
  const double coeff = advantage / normalizer;
  for (const auto& step : segment) {
    accumulate_score_gradient(policy, step.state, step.action, coeff, grad);
  }
  return grad;
}

policy::ParamTable dfpo_gradient(const policy::TabularPolicy& policy,
                                 const std::vector<Trajectory>& trajectories,
                                 const advantage::RewardGroup& rewards,
                                 const advantage::AdvantageSet& advantages) {
  auto grad = policy::zero_like(policy);
  const double group = static_cast<double>(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const double len = static_cast<double>(rewards.total_length(i));
    const double draft_coeff = advantages.draft_advantages[i] / (len * group);
    const double sol_coeff = advantages.solution_advantages[i] / (len * group);
    for (const auto& step : trajectories[i].draft_steps) {
      accumulate_score_gradient(policy, step.state, step.action, draft_coeff, grad);
    }
    for (const auto& step : trajectories[i].exec_steps) {
      accumulate_score_gradient(policy, step.state, step.action, sol_coeff, grad);
    }
  }
  return grad;
}

policy::ParamTable mgrpo_gradient(const policy::TabularPolicy& policy,
                                  const std::vector<Trajectory>& trajectories,
                                  const advantage::RewardGroup& rewards,
                                  const std::vector<double>& solution_advantages) {
  auto grad = policy::zero_like(policy);
  const double group = static_cast<double>(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const double len = static_cast<double>(rewards.total_length(i));
    const double coeff = solution_advantages[i] / (len * group);
    for (const auto& step : trajectories[i].draft_steps) {
      accumulate_score_gradient(policy, step.state, step.action, coeff, grad);
    }
    for (const auto& step : trajectories[i].exec_steps) {
      accumulate_score_gradient(policy, step.state, step.action, coeff, grad);
    }
  }
  return grad;
}

policy::ParamTable draft_bias_gradient(const policy::TabularPolicy& policy,
                                       const std::vector<Trajectory>& trajectories,
                                       const std::vector<double>& bias) {
  auto grad = policy::zero_like(policy);
  const double group = static_cast<double>(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const double coeff = bias[i] / group;
    for (const auto& step : trajectories[i].draft_steps) {
      accumulate_score_gradient(policy, step.state, step.action, coeff, grad);
    }
  }
  return grad;
}

double verify_decomposition(const policy::TabularPolicy& policy,
                            const std::vector<Trajectory>& trajectories,
                            const advantage::RewardGroup& rewards,
                            const advantage::AdvantageSet& advantages) {
  const auto direct = dfpo_gradient(policy, trajectories, rewards, advantages);

  auto decomposed = mgrpo_gradient(policy, trajectories, rewards, advantages.solution_advantages);
  const auto bias = advantage::bias_terms(rewards, advantages);
  const auto correction = draft_bias_gradient(policy, trajectories, bias);
  for (std::size_t s = 0; s < decomposed.size(); ++s) {
    for (std::size_t a = 0; a < decomposed[s].size(); ++a) {
      decomposed[s][a] += correction[s][a];
    }
  }
  return policy::max_abs_difference(direct, decomposed);
}

double dfpo_surrogate_value(const policy::TabularPolicy& policy,
                            const std::vector<Trajectory>& trajectories,
                            const advantage::RewardGroup& rewards,
                            const advantage::AdvantageSet& advantages) {
  double acc = 0.0;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const double len = static_cast<double>(rewards.total_length(i));
    double draft_sum = 0.0;
    for (const auto& step : trajectories[i].draft_steps) {
      draft_sum += policy.log_prob(step.state, step.action);
    }
    double exec_sum = 0.0;
    for (const auto& step : trajectories[i].exec_steps) {
      exec_sum += policy.log_prob(step.state, step.action);
    }
    acc += (advantages.draft_advantages[i] * draft_sum +
            advantages.solution_advantages[i] * exec_sum) /
           len;
  }
  return acc / static_cast<double>(trajectories.size());
}

policy::ParamTable finite_difference_gradient(
    const policy::TabularPolicy& policy,
    const std::function<double(const policy::TabularPolicy&)>& scalar, double step) {
  if (step <= 0.0) throw DomainError("finite-difference step must be positive");
  auto grad = policy::zero_like(policy);
  policy::TabularPolicy probe = policy;
  for (int s = 0; s < policy.state_count(); ++s) {
    for (int a = 0; a < policy.action_count(s); ++a) {
      const double original = probe.parameter(s, a);
      probe.set_parameter(s, a, original + step);
      const double plus = scalar(probe);
      probe.set_parameter(s, a, original - step);
      const double minus = scalar(probe);
      probe.set_parameter(s, a, original);
      grad[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] =
          (plus - minus) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace draftlab::lab
