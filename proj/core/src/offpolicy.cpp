#include "draftlab/offpolicy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "draftlab/errors.hpp"

namespace draftlab::offpolicy {

namespace {

void validate_shapes(const advantage::RewardGroup& group, const TokenLogProbs& new_lp,
                     const TokenLogProbs& old_lp) {
  if (new_lp.size() != group.size() || old_lp.size() != group.size()) {
    throw ShapeError("token log-prob vectors must match group size");
  }
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto expected = static_cast<std::size_t>(group.total_length(i));
    if (new_lp[i].size() != expected || old_lp[i].size() != expected) {
      throw ShapeError("trajectory " + std::to_string(i) + " expects " +
                       std::to_string(expected) + " tokens, got new=" +
                       std::to_string(new_lp[i].size()) + " old=" +
                       std::to_string(old_lp[i].size()));
    }
  }
}

double clipped_token(double ratio, double adv, double lo, double hi) {
  const double clipped = std::clamp(ratio, lo, hi);
  return std::min(ratio * adv, clipped * adv);
}

}  // namespace

double clipped_objective(const advantage::RewardGroup& group,
                         const TokenLogProbs& new_logprobs,
                         const TokenLogProbs& old_logprobs,
                         const advantage::AdvantageSet& advantages,
                         double eps_low, double eps_high) {
  if (!(eps_low > 0.0 && eps_low < 1.0 && eps_high > 0.0 && eps_high < 1.0)) {
    throw DomainError("clipping widths must lie in (0,1)");
  }
  validate_shapes(group, new_logprobs, old_logprobs);

  const double lo = 1.0 - eps_low;
  const double hi = 1.0 + eps_high;
  double acc = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const std::size_t d_len = static_cast<std::size_t>(group.draft_lengths[i]);
    const std::size_t total = new_logprobs[i].size();
    double traj = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      const double ratio = std::exp(new_logprobs[i][t] - old_logprobs[i][t]);
      const double adv = t < d_len ? advantages.draft_advantages[i]
                                   : advantages.solution_advantages[i];
      traj += clipped_token(ratio, adv, lo, hi);
    }
    acc += traj / static_cast<double>(total);
  }
  return acc / static_cast<double>(group.size());
}

double surrogate_gap(const advantage::RewardGroup& group,
                     const TokenLogProbs& new_logprobs,
                     const TokenLogProbs& old_logprobs,
                     const advantage::AdvantageSet& advantages,
                     double eps) {
  if (!advantages.masked) {
    throw PreconditionError("surrogate bound is stated for masked advantages");
  }
  validate_shapes(group, new_logprobs, old_logprobs);
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("clipping width must lie in (0,1)");
  }

  const double lo = 1.0 - eps;
  const double hi = 1.0 + eps;

  // Surrogate: solution advantage on every token, plus the clipped-ratio
  // bonus on draft tokens of successes whose draft advantage is nonnegative.
  double surrogate = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const std::size_t d_len = static_cast<std::size_t>(group.draft_lengths[i]);
    const std::size_t total = new_logprobs[i].size();
    const double a_sol = advantages.solution_advantages[i];
    const double a_draft = advantages.draft_advantages[i];
    const bool bonus_case = group.solution_rewards[i] == 1.0 && a_draft >= 0.0;

    double traj = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      const double ratio = std::exp(new_logprobs[i][t] - old_logprobs[i][t]);
      traj += clipped_token(ratio, a_sol, lo, hi);
      if (bonus_case && t < d_len) {
        traj += std::min(ratio, std::clamp(ratio, lo, hi)) * (a_draft - a_sol);
      }
    }
    surrogate += traj / static_cast<double>(total);
  }
  surrogate /= static_cast<double>(group.size());

  const double off = clipped_objective(group, new_logprobs, old_logprobs, advantages, eps, eps);
  return surrogate - off;
}

}  // namespace draftlab::offpolicy
