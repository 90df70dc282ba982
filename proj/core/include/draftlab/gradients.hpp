#pragma once

/**
 * @file gradients.hpp
 * @brief Analytic policy gradients of the group objectives, plus the
 *        gradient-level decomposition residual and a finite-difference probe.
 *
 * Everything here treats advantages as frozen constants of the rollout; the
 * gradients are score-function sums over the visited (state, action) steps.
 */

#include <functional>
#include <vector>

#include "draftlab/advantage.hpp"
#include "draftlab/draftworld.hpp"
#include "draftlab/tabular_policy.hpp"

namespace draftlab::lab {

/**
 * Accumulates coefficient * d log pi(action|state) / d theta into `into` for
 * one visited step: +coeff*(1 - pi(a)) on the chosen action, -coeff*pi(a')
 * elsewhere in the state's row.
 */
void accumulate_score_gradient(const policy::TabularPolicy& policy, int state, int action,
                               double coefficient, policy::ParamTable& into);

/**
 * Gradient of one trajectory segment: (advantage / normalizer) times the sum
 * of token score gradients. `normalizer` is the owning trajectory's total
 * token count.
 */
policy::ParamTable analytic_segment_gradient(const policy::TabularPolicy& policy,
                                             const std::vector<StepRecord>& segment,
                                             double advantage, double normalizer);

/// Gradient of the draft/follow objective over a rollout group.
policy::ParamTable dfpo_gradient(const policy::TabularPolicy& policy,
                                 const std::vector<Trajectory>& trajectories,
                                 const advantage::RewardGroup& rewards,
                                 const advantage::AdvantageSet& advantages);

/// Gradient of the whole-sequence baseline objective (solution advantage on
/// every token of the concatenated draft+solution sequence).
policy::ParamTable mgrpo_gradient(const policy::TabularPolicy& policy,
                                  const std::vector<Trajectory>& trajectories,
                                  const advantage::RewardGroup& rewards,
                                  const std::vector<double>& solution_advantages);

/// The draft-segment correction: (1/G) sum_i bias_i * d log pi(draft_i).
policy::ParamTable draft_bias_gradient(const policy::TabularPolicy& policy,
                                       const std::vector<Trajectory>& trajectories,
                                       const std::vector<double>& bias);

/**
 * Max-norm residual between the draft/follow gradient and the sum of the
 * baseline gradient and the draft bias gradient, each side computed by its
 * own accumulation path. Algebraically zero; the residual exposes any
 * divergence between the two routes.
 */
double verify_decomposition(const policy::TabularPolicy& policy,
                            const std::vector<Trajectory>& trajectories,
                            const advantage::RewardGroup& rewards,
                            const advantage::AdvantageSet& advantages);

/// Objective value of the frozen-advantage surrogate at the given policy;
/// the scalar whose gradient dfpo_gradient computes. Used by the
/// finite-difference cross-check.
double dfpo_surrogate_value(const policy::TabularPolicy& policy,
                            const std::vector<Trajectory>& trajectories,
                            const advantage::RewardGroup& rewards,
                            const advantage::AdvantageSet& advantages);

/// Central-difference gradient of an arbitrary scalar of the policy.
policy::ParamTable finite_difference_gradient(
    const policy::TabularPolicy& policy,
    const std::function<double(const policy::TabularPolicy&)>& scalar, double step);

}  // namespace draftlab::lab
