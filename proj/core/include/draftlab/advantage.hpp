#pragma once

/**
 * @file advantage.hpp
 * @brief Group-relative advantage rules for draft-then-execute trajectories.
 *
 * A rollout group holds G trajectories answering the same question. Each
 * trajectory carries a binary solution reward, a dense draft reward gated by
 * the solution reward, and the token lengths of its draft and solution
 * segments. Everything downstream — the draft/follow objective, the
 * whole-sequence baseline objective, the masked advantage rule, and the
 * inequality checks run by the verify battery — is a pure function of those
 * vectors.
 *
 * Conventions fixed here and relied on throughout:
 *  - normalization uses the population standard deviation (divide by G);
 *  - a zero-variance group produces all-zero advantages, so no update flows
 *    from a group whose rewards carry no signal;
 *  - the per-trajectory scaling constant is c_i = 1/(draft_len + solution_len).
 */

#include <cstddef>
#include <vector>

namespace draftlab::advantage {

/// Per-group reward vectors. Construction validates every invariant.
struct RewardGroup {
  std::vector<double> solution_rewards;  ///< each exactly 0 or 1
  std::vector<double> draft_rewards;     ///< in [0,1]; 0 whenever the solution failed
  std::vector<int> draft_lengths;        ///< tokens in the draft segment, >= 1
  std::vector<int> solution_lengths;     ///< tokens in the solution segment, >= 1

  RewardGroup(std::vector<double> solution, std::vector<double> draft,
              std::vector<int> d_len, std::vector<int> y_len);

  std::size_t size() const noexcept { return solution_rewards.size(); }
  int total_length(std::size_t i) const { return draft_lengths[i] + solution_lengths[i]; }
  /// Number of successful / failed trajectories.
  int success_count() const noexcept;
  int failure_count() const noexcept;
};

/// Group-relative advantages for both segments, plus the scaling constants.
struct AdvantageSet {
  std::vector<double> draft_advantages;
  std::vector<double> solution_advantages;
  std::vector<double> bias_coefficients;  ///< c_i = 1/(draft_len_i + solution_len_i)
  bool masked = false;                    ///< negative sample masking applied
};

/// Mean, population standard deviation, and (when defined) their ratio.
struct GroupStats {
  double mean = 0.0;
  double std = 0.0;
  /// std/mean; meaningful only when mean > 0 (see cv()).
  double cv = 0.0;
};

/// Population statistics of a vector. cv is filled only for mean > 0.
GroupStats group_stats(const std::vector<double>& values);

/**
 * Group-relative normalization: (r_i − mean)/std with population std.
 * A zero-std group maps to the all-zero vector; fewer than two entries is a
 * GroupTooSmallError.
 */
std::vector<double> group_normalize(const std::vector<double>& rewards);

/// Dense draft reward: confidence metric gated by the binary solution reward.
/// rho outside [0,1] or a non-binary solution reward is a DomainError.
double draft_reward(double rho, double solution_reward);

/**
 * Draft confidence from per-token log-probabilities: exp(mean), the
 * geometric-mean token probability in (0,1]. An empty vector raises
 * EmptyDraftError; a positive entry raises InvalidLogProbError.
 */
double rho_from_logprobs(const std::vector<double>& token_logprobs);

/**
 * Negative sample masking. Failed trajectories take their solution advantage;
 * successful ones take the draft reward normalized over the full group's
 * draft rewards. `solution_advantages` must come from
 * group_normalize(group.solution_rewards).
 */
std::vector<double> nsm_advantages(const RewardGroup& group,
                                   const std::vector<double>& solution_advantages);

/// Which advantage rule to apply to the draft segment.
enum class MaskMode { Unmasked, Masked };

/// Full advantage computation: solution advantages by group normalization,
/// draft advantages unmasked (plain normalization) or masked (NSM).
AdvantageSet compute_advantages(const RewardGroup& group, MaskMode mode);

/**
 * Draft/follow objective value: the group mean of per-trajectory
 * length-weighted advantage mixes,
 *   (1/G) sum_i (|d_i| Ad_i + |y_i| As_i) / (|d_i| + |y_i|).
 * Token sums collapse because advantages are constant within a segment.
 */
double dfpo_objective(const RewardGroup& group, const AdvantageSet& advantages);

/**
 * Whole-sequence baseline objective. With kl_weight = 0 (the only supported
 * configuration; no reference policy is maintained here) the per-token mean
 * of a constant advantage is the advantage itself, so the value is the group
 * mean of the solution advantages. kl_weight > 0 raises
 * UnsupportedConfigError rather than silently ignoring the term.
 */
double mgrpo_objective(const RewardGroup& group,
                       const std::vector<double>& solution_advantages,
                       double kl_weight);

/// Per-trajectory bias terms c_i (Ad_i − As_i) that separate the draft/follow
/// gradient from the whole-sequence baseline gradient.
std::vector<double> bias_terms(const RewardGroup& group, const AdvantageSet& advantages);

/// Result of the three-part relative-advantage inequality check.
struct RelativeAdvantageCheck {
  bool part1 = false;  ///< failures: As_i <= Ad_i
  bool part2 = false;  ///< successes with below-mean draft reward: Ad_i <= As_i
  bool part3 = false;  ///< best draft, if successful: As_imax <= Ad_imax
  bool all() const noexcept { return part1 && part2 && part3; }
};

/**
 * Checks the three relative-advantage inequalities on UNMASKED advantages
 * (the hypotheses under which they are proved; training applies masking).
 * Requires at least one success and one failure, else PreconditionError.
 * Each inequality is checked with slack 1e-10.
 */
RelativeAdvantageCheck check_relative_advantage(const RewardGroup& group);

/**
 * Coefficient-of-variation inequality: CV(draft rewards) >= CV(solution
 * rewards) − 1e-10. Requires a mixed group and a positive draft mean
 * (UndefinedCvError otherwise).
 */
bool cv_inequality_holds(const RewardGroup& group);

/// Bhatia–Davis bound: population variance <= mean·(max − mean) + 1e-12
/// for data in [0, max]. Empty input is a DomainError.
bool variance_bound_holds(const std::vector<double>& values);

}  // namespace draftlab::advantage
