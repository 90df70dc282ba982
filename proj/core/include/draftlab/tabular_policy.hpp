#pragma once

/**
 * @file tabular_policy.hpp
 * @brief Tabular softmax policies and exact single-step update algebra.
 *
 * The policy is a dense table theta[state][action] with per-state action
 * counts. Softmax rows are computed max-shifted. The stochastic update for
 * one (state, action, advantage) transition follows the score-function form
 *   delta[a'] = lr * (1{a'=a} - pi(a')) * advantage,
 * with the chosen-action entry built as the negated sum of the others so a
 * row of deltas cancels identically, not just to rounding.
 */

#include <cstddef>
#include <string>
#include <vector>

namespace draftlab::policy {

/// Parameter-shaped table (same layout as the policy's theta).
using ParamTable = std::vector<std::vector<double>>;

class TabularPolicy {
public:
  /// One entry per state giving that state's action count (each >= 2).
  explicit TabularPolicy(std::vector<int> actions_per_state);

  int state_count() const { return static_cast<int>(theta_.size()); }
  int action_count(int state) const;

  double parameter(int state, int action) const;
  void set_parameter(int state, int action, double value);

  /// Softmax distribution over the state's actions; sums to 1 within 1e-12.
  std::vector<double> distribution(int state) const;

  double log_prob(int state, int action) const;

  /// Natural-log entropy of the state's action distribution.
  double entropy(int state) const;

  /// theta += scale * delta. Shape mismatch raises ShapeError.
  void apply(const ParamTable& delta, double scale = 1.0);

  /// True when every parameter is finite.
  bool finite() const;

  const ParamTable& raw() const { return theta_; }
  ParamTable& raw() { return theta_; }

private:
  void check_state(int state) const;
  ParamTable theta_;
};

ParamTable zero_like(const TabularPolicy& policy);

/// Largest absolute entry across two same-shaped tables' difference.
double max_abs_difference(const ParamTable& a, const ParamTable& b);

/**
 * Exact one-transition update. Only `state`'s row is nonzero in the result;
 * the chosen action's entry equals the negated sum of the other entries, so
 * summing the row in index order with the chosen entry added last yields
 * exactly 0.0.
 */
ParamTable single_step_update(const TabularPolicy& policy, int state, int chosen_action,
                              double advantage, double learning_rate);

/// Row sum of a single-state delta evaluated the way the invariant is stated:
/// non-chosen entries in index order, chosen entry last.
double update_row_sum(const ParamTable& delta, int state, int chosen_action);

/// Entropy change of one state's distribution under a parameter delta.
struct EntropyDelta {
  double exact = 0.0;   ///< H(theta + lr*delta) − H(theta)
  double approx = 0.0;  ///< −Cov_pi(log pi, lr*delta): the first-order term
};

/**
 * Exact and covariance-approximated entropy change for `state` under
 * `delta_row` scaled by `learning_rate`. |exact − approx| is second order in
 * the scale: halving the rate shrinks it by ~4x.
 */
EntropyDelta entropy_delta_check(const TabularPolicy& policy, int state,
                                 const std::vector<double>& delta_row, double learning_rate);

}  // namespace draftlab::policy
