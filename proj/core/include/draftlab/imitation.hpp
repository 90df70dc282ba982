#pragma once

/**
 * @file imitation.hpp
 * @brief Behavioral cloning of expert demonstrations, draft prefix included.
 */

#include <vector>

#include "draftlab/draftworld.hpp"
#include "draftlab/tabular_policy.hpp"

namespace draftlab::lab {

struct ImitationOptions {
  double learning_rate = 0.5;
  int epochs = 200;
  /// When false, draft steps are excluded from the loss (plain tool-use
  /// cloning); draft-state parameters then never move.
  bool include_draft = true;
};

struct ImitationResult {
  policy::TabularPolicy policy;
  /// Mean expert log-likelihood after each epoch (epochs entries).
  std::vector<double> log_likelihood;
};

/// Mean per-trajectory expert log-likelihood under a policy.
double expert_log_likelihood(const policy::TabularPolicy& policy,
                             const std::vector<Trajectory>& experts, bool include_draft);

/**
 * Full-batch gradient ascent on the mean expert log-likelihood. The
 * objective is concave in the parameters, so with the default rate the
 * likelihood never decreases across epochs. Empty expert set raises
 * DomainError.
 */
ImitationResult dtft_imitation(const std::vector<Trajectory>& experts,
                               const policy::TabularPolicy& initial,
                               const ImitationOptions& options);

}  // namespace draftlab::lab
