#include "draftlab/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "draftlab/errors.hpp"

namespace draftlab::advantage {

namespace {

constexpr double kInequalitySlack = 1e-10;

bool is_binary(double r) { return r == 0.0 || r == 1.0; }

}  // namespace

RewardGroup::RewardGroup(std::vector<double> solution, std::vector<double> draft,
                         std::vector<int> d_len, std::vector<int> y_len)
    : solution_rewards(std::move(solution)),
      draft_rewards(std::move(draft)),
      draft_lengths(std::move(d_len)),
      solution_lengths(std::move(y_len)) {
  const std::size_t g = solution_rewards.size();
  if (g < 2) {
    throw GroupTooSmallError("reward group needs at least 2 trajectories, got " +
                             std::to_string(g));
  }
  if (draft_rewards.size() != g || draft_lengths.size() != g || solution_lengths.size() != g) {
    throw ShapeError("reward group vectors must share one length");
  }
  for (std::size_t i = 0; i < g; ++i) {
    if (!is_binary(solution_rewards[i])) {
      throw DomainError("solution reward must be exactly 0 or 1");
    }
    if (!(draft_rewards[i] >= 0.0 && draft_rewards[i] <= 1.0)) {
      throw DomainError("draft reward must lie in [0,1]");
    }
    if (solution_rewards[i] == 0.0 && draft_rewards[i] != 0.0) {
      throw DomainError("draft reward must be 0 when the solution reward is 0");
    }
    if (draft_lengths[i] < 1 || solution_lengths[i] < 1) {
      throw DomainError("segment lengths must be positive");
    }
  }
}

int RewardGroup::success_count() const noexcept {
  return static_cast<int>(std::count(solution_rewards.begin(), solution_rewards.end(), 1.0));
}

int RewardGroup::failure_count() const noexcept {
  return static_cast<int>(size()) - success_count();
}

GroupStats group_stats(const std::vector<double>& values) {
  GroupStats s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  double sq = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    sq += d * d;
  }
  s.std = std::sqrt(sq / n);
  if (s.mean > 0.0) s.cv = s.std / s.mean;
  return s;
}

std::vector<double> group_normalize(const std::vector<double>& rewards) {
  if (rewards.size() < 2) {
    throw GroupTooSmallError("group_normalize needs at least 2 rewards");
  }
  const GroupStats s = group_stats(rewards);
  std::vector<double> out(rewards.size(), 0.0);
  if (s.std == 0.0) return out;  // no signal, no update
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = (rewards[i] - s.mean) / s.std;
  }
  return out;
}

double draft_reward(double rho, double solution_reward) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError("rho must lie in [0,1]");
  }
  if (!is_binary(solution_reward)) {
    throw DomainError("solution reward must be exactly 0 or 1");
  }
  return rho * solution_reward;
}

double rho_from_logprobs(const std::vector<double>& token_logprobs) {
  if (token_logprobs.empty()) {
    throw EmptyDraftError("draft has no tokens");
  }
  double sum = 0.0;
  for (double lp : token_logprobs) {
    if (lp > 0.0) {
      throw InvalidLogProbError("log-probability above zero: " + std::to_string(lp));
    }
    sum += lp;
  }
  return std::exp(sum / static_cast<double>(token_logprobs.size()));
}

std::vector<double> nsm_advantages(const RewardGroup& group,
                                   const std::vector<double>& solution_advantages) {
  if (solution_advantages.size() != group.size()) {
    throw ShapeError("solution advantages do not match group size");
  }
  const std::vector<double> draft_norm = group_normalize(group.draft_rewards);
  std::vector<double> out(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    out[i] = group.solution_rewards[i] == 0.0 ? solution_advantages[i] : draft_norm[i];
  }
  return out;
}

AdvantageSet compute_advantages(const RewardGroup& group, MaskMode mode) {
  AdvantageSet set;
  set.solution_advantages = group_normalize(group.solution_rewards);
  set.draft_advantages = mode == MaskMode::Masked
                             ? nsm_advantages(group, set.solution_advantages)
                             : group_normalize(group.draft_rewards);
  set.masked = mode == MaskMode::Masked;
  set.bias_coefficients.resize(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    set.bias_coefficients[i] = 1.0 / static_cast<double>(group.total_length(i));
  }
  return set;
}

double dfpo_objective(const RewardGroup& group, const AdvantageSet& advantages) {
  if (advantages.draft_advantages.size() != group.size() ||
      advantages.solution_advantages.size() != group.size()) {
    throw ShapeError("advantage set does not match group size");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double d = static_cast<double>(group.draft_lengths[i]);
    const double y = static_cast<double>(group.solution_lengths[i]);
    acc += (d * advantages.draft_advantages[i] + y * advantages.solution_advantages[i]) / (d + y);
  }
  return acc / static_cast<double>(group.size());
}

double mgrpo_objective(const RewardGroup& group,
                       const std::vector<double>& solution_advantages,
                       double kl_weight) {
  if (solution_advantages.size() != group.size()) {
    throw ShapeError("solution advantages do not match group size");
  }
  if (kl_weight != 0.0) {
    throw UnsupportedConfigError(
        "KL-regularized objective requires a reference policy; this lab runs fully on-policy "
        "with kl_weight = 0");
  }
  double acc = 0.0;
  for (double a : solution_advantages) acc += a;
  return acc / static_cast<double>(group.size());
}

std::vector<double> bias_terms(const RewardGroup& group, const AdvantageSet& advantages) {
  if (advantages.draft_advantages.size() != group.size()) {
    throw ShapeError("advantage set does not match group size");
  }
  std::vector<double> out(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    out[i] = advantages.bias_coefficients[i] *
             (advantages.draft_advantages[i] - advantages.solution_advantages[i]);
  }
  return out;
}

RelativeAdvantageCheck check_relative_advantage(const RewardGroup& group) {
  if (group.success_count() == 0 || group.failure_count() == 0) {
    throw PreconditionError("relative-advantage check needs at least one success and one failure");
  }
  const AdvantageSet adv = compute_advantages(group, MaskMode::Unmasked);
  const GroupStats draft = group_stats(group.draft_rewards);

  RelativeAdvantageCheck result;
  result.part1 = true;
  result.part2 = true;
  result.part3 = true;

  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group.solution_rewards[i] == 0.0) {
      if (adv.solution_advantages[i] > adv.draft_advantages[i] + kInequalitySlack) {
        result.part1 = false;
      }
    } else if (group.draft_rewards[i] <= draft.mean) {
      if (adv.draft_advantages[i] > adv.solution_advantages[i] + kInequalitySlack) {
        result.part2 = false;
      }
    }
  }

  const auto imax = static_cast<std::size_t>(
      std::max_element(group.draft_rewards.begin(), group.draft_rewards.end()) -
      group.draft_rewards.begin());
  // Part 3 is vacuous when the best draft did not succeed, and undefined when
  // the draft rewards carry no spread (its advantage divides by a zero std).
  if (group.solution_rewards[imax] == 1.0 && draft.std > 0.0) {
    if (adv.solution_advantages[imax] > adv.draft_advantages[imax] + kInequalitySlack) {
      result.part3 = false;
    }
  }
  return result;
}

bool cv_inequality_holds(const RewardGroup& group) {
  if (group.success_count() == 0 || group.failure_count() == 0) {
    throw PreconditionError("CV inequality needs at least one success and one failure");
  }
  const GroupStats draft = group_stats(group.draft_rewards);
  if (draft.mean <= 0.0) {
    throw UndefinedCvError("draft reward mean is zero; CV undefined");
  }
  const GroupStats solution = group_stats(group.solution_rewards);
  return draft.cv >= solution.cv - kInequalitySlack;
}

bool variance_bound_holds(const std::vector<double>& values) {
  if (values.empty()) {
    throw DomainError("variance bound needs at least one value");
  }
  double max = values.front();
  for (double v : values) {
    if (v < 0.0) throw DomainError("values must be nonnegative");
    max = std::max(max, v);
  }
  const GroupStats s = group_stats(values);
  return s.std * s.std <= s.mean * (max - s.mean) + 1e-12;
}

}  // namespace draftlab::advantage
