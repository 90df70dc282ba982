#pragma once

/**
 * @file bandit.hpp
 * @brief Upper-confidence-bound diagnostic probe for the knowing-doing gap.
 *
 * Each environment is a small Bernoulli bandit. Per decision step the agent
 * declares per-arm value estimates ("knowing") and picks an arm ("doing");
 * the harness compares both against the true confidence-bound argmax and
 * accumulates a 2x2 confusion matrix. Ties break toward the lowest arm index
 * on the truth side and in every scripted agent, so "knowing" stays
 * well-defined under ties.
 */

#include <cstdint>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "draftlab/rng.hpp"

namespace draftlab::probes {

struct BanditEnv {
  int n_arms = 3;
  double exploration_c = 1.0;
  std::vector<double> means;      ///< hidden Bernoulli means
  std::vector<int> pulls;
  std::vector<double> emp_means;  ///< empirical mean reward per arm
  int t = 0;                      ///< total pulls so far

  BanditEnv(int arms, double c, std::vector<double> hidden_means);

  /// Pulls every arm once so each confidence bound is defined.
  void warm_start(Rng& rng);

  /// Applies one pull; returns the Bernoulli reward. Out-of-range arms raise
  /// ProtocolError.
  int step(int arm, Rng& rng);
};

/// Confidence-bound values per arm: emp_mean + c*sqrt(log(t)/pulls).
/// An unpulled arm (or t < n_arms) raises PreconditionError.
std::vector<double> ucb_values(const BanditEnv& env);

/// Lowest-index argmax.
int argmax_lowest(const std::vector<double>& values);

/// What an agent emits each decision step.
struct ArmDecision {
  std::vector<double> declared_values;  ///< agent's per-arm estimates
  int chosen_arm = -1;
};

/// Per-step context handed to agents (used by transcript replay).
struct ProbeContext {
  int env_index = 0;
  int step_index = 0;
};

class ProbeAgent {
public:
  virtual ~ProbeAgent() = default;
  virtual ArmDecision decide(const BanditEnv& env, const ProbeContext& context, Rng& rng) = 0;
};

/// Declares the true confidence bounds and picks their argmax. Zero gap.
std::unique_ptr<ProbeAgent> make_exact_ucb_agent();

/// Declares the true bounds perturbed by Gaussian noise, then picks its own
/// declared argmax: imperfect knowing, doing consistent with it.
std::unique_ptr<ProbeAgent> make_noisy_knowing_agent(double sigma);

/// Declares the true bounds (perfect knowing) but picks the empirical-mean
/// argmax: the knowing-doing gap made literal.
std::unique_ptr<ProbeAgent> make_greedy_doing_agent();

/// 2x2 confusion counts over (knowing, doing).
struct KnowingDoingMatrix {
  std::int64_t counts[2][2] = {{0, 0}, {0, 0}};  ///< [knowing][doing]

  std::int64_t total() const;
  double knowing_rate() const;
  double doing_rate() const;
  double doing_given_knowing() const;  ///< 0 when no knowing steps occurred
  nlohmann::json to_json() const;
};

struct ProbeOptions {
  int n_envs = 64;
  int steps = 50;
  int n_arms = 3;
  double exploration_c = 1.0;
  std::uint64_t seed = 7;
  /// Hidden means drawn uniformly from this range per environment.
  double mean_lo = 0.1;
  double mean_hi = 0.9;
};

/**
 * Runs the probe: per environment, warm-start (one pull per arm, not counted
 * as decision steps) then `steps` decisions. knowing := declared argmax
 * equals the true argmax; doing := chosen arm equals the true argmax.
 */
KnowingDoingMatrix run_probe(ProbeAgent& agent, const ProbeOptions& options);

/// Steps at which the true confidence-bound argmax differs from the
/// empirical-mean argmax while driving the given agent. Supports the
/// greedy-agent check: any divergence forces doing|knowing < 1.
std::int64_t count_ucb_greedy_divergence(ProbeAgent& agent, const ProbeOptions& options);

}  // namespace draftlab::probes
