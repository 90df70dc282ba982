#pragma once

/**
 * @file offpolicy.hpp
 * @brief Clipped off-policy objective over draft/solution segments and the
 *        surrogate lower-bound gap it maintains under negative sample masking.
 *
 * Per-token log-probabilities are laid out one vector per trajectory, draft
 * tokens first: entry t < draft_len belongs to the draft segment, the rest to
 * the solution segment. New and old vectors must align token for token.
 */

#include <vector>

#include "draftlab/advantage.hpp"

namespace draftlab::offpolicy {

/// Per-trajectory token log-probabilities, draft segment first.
using TokenLogProbs = std::vector<std::vector<double>>;

/**
 * Clipped importance-weighted objective:
 * per token min{ratio·A, clip(ratio, 1−eps_low, 1+eps_high)·A} with the draft
 * advantage on draft tokens and the solution advantage on solution tokens,
 * summed per trajectory, divided by the trajectory's total token count, and
 * averaged over the group. eps_low = eps_high gives symmetric clipping;
 * a larger eps_high reproduces the clip-higher baseline setting.
 *
 * Misaligned vectors raise ShapeError; eps outside (0,1) raises DomainError.
 * With new_logprobs == old_logprobs every ratio is 1 and the value equals
 * dfpo_objective.
 */
double clipped_objective(const advantage::RewardGroup& group,
                         const TokenLogProbs& new_logprobs,
                         const TokenLogProbs& old_logprobs,
                         const advantage::AdvantageSet& advantages,
                         double eps_low, double eps_high);

/**
 * J_surrogate − J_clipped for a masked advantage set. The surrogate applies
 * the solution advantage to every token and adds, for successful
 * trajectories with nonnegative draft advantage, the clipped-ratio bonus
 * min{ratio, clip(ratio)}·(Ad − As) on draft tokens. The difference is
 * nonnegative up to rounding (contract: >= −1e-10).
 *
 * Unmasked advantages raise PreconditionError: the bound is only proved with
 * masking in force.
 */
double surrogate_gap(const advantage::RewardGroup& group,
                     const TokenLogProbs& new_logprobs,
                     const TokenLogProbs& old_logprobs,
                     const advantage::AdvantageSet& advantages,
                     double eps);

}  // namespace draftlab::offpolicy
