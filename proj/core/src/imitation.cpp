#include "draftlab/imitation.hpp"

#include "draftlab/errors.hpp"
#include "draftlab/gradients.hpp"

namespace draftlab::lab {

double expert_log_likelihood(const policy::TabularPolicy& policy,
                             const std::vector<Trajectory>& experts, bool include_draft) {
  double total = 0.0;
  for (const auto& traj : experts) {
    if (include_draft) {
      for (const auto& step : traj.draft_steps) total += policy.log_prob(step.state, step.action);
    }
    for (const auto& step : traj.exec_steps) total += policy.log_prob(step.state, step.action);
  }
  return total / static_cast<double>(experts.size());
}

ImitationResult dtft_imitation(const std::vector<Trajectory>& experts,
                               const policy::TabularPolicy& initial,
                               const ImitationOptions& options) {
  if (experts.empty()) throw DomainError("imitation needs at least one expert trajectory");
  if (options.learning_rate <= 0.0) throw DomainError("learning rate must be positive");
  if (options.epochs < 1) throw DomainError("epochs must be >= 1");

  ImitationResult result{initial, {}};
  result.log_likelihood.reserve(static_cast<std::size_t>(options.epochs));
  const double scale = 1.0 / static_cast<double>(experts.size());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    auto grad = policy::zero_like(result.policy);
    for (const auto& traj : experts) {
      if (options.include_draft) {
        for (const auto& step : traj.draft_steps) {
          accumulate_score_gradient(result.policy, step.state, step.action, scale, grad);
        }
      }
      for (const auto& step : traj.exec_steps) {
        accumulate_score_gradient(result.policy, step.state, step.action, scale, grad);
      }
    }
    result.policy.apply(grad, options.learning_rate);
    result.log_likelihood.push_back(
        expert_log_likelihood(result.policy, experts, options.include_draft));
  }
  return result;
}

}  // namespace draftlab::lab
