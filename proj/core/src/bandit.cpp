#include "draftlab/bandit.hpp"

#include <cmath>
#include <string>

#include "draftlab/errors.hpp"

namespace draftlab::probes {

BanditEnv::BanditEnv(int arms, double c, std::vector<double> hidden_means)
    : n_arms(arms), exploration_c(c), means(std::move(hidden_means)) {
  if (n_arms < 2) throw DomainError("bandit needs at least two arms");
  if (exploration_c < 0.0) throw DomainError("exploration coefficient must be nonnegative");
  if (static_cast<int>(means.size()) != n_arms) {
    throw ShapeError("hidden means must match the arm count");
  }
  for (double m : means) {
    if (!(m >= 0.0 && m <= 1.0)) throw DomainError("Bernoulli means must lie in [0,1]");
  }
  pulls.assign(static_cast<std::size_t>(n_arms), 0);
  emp_means.assign(static_cast<std::size_t>(n_arms), 0.0);
}

void BanditEnv::warm_start(Rng& rng) {
  for (int arm = 0; arm < n_arms; ++arm) step(arm, rng);
}

int BanditEnv::step(int arm, Rng& rng) {
  if (arm < 0 || arm >= n_arms) {
    throw ProtocolError("agent chose arm " + std::to_string(arm) + " of " +
                        std::to_string(n_arms));
  }
  const int reward = rng.bernoulli(means[static_cast<std::size_t>(arm)]) ? 1 : 0;
  auto idx = static_cast<std::size_t>(arm);
  pulls[idx] += 1;
  emp_means[idx] += (static_cast<double>(reward) - emp_means[idx]) / pulls[idx];
  t += 1;
  return reward;
}

std::vector<double> ucb_values(const BanditEnv& env) {
  if (env.t < env.n_arms) {
    throw PreconditionError("confidence bounds need t >= n_arms");
  }
  std::vector<double> values(static_cast<std::size_t>(env.n_arms));
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (env.pulls[a] < 1) {
      throw PreconditionError("arm " + std::to_string(a) + " never pulled after warm start");
    }
    values[a] = env.emp_means[a] +
                env.exploration_c * std::sqrt(std::log(static_cast<double>(env.t)) /
                                              static_cast<double>(env.pulls[a]));
  }
  return values;
}

int argmax_lowest(const std::vector<double>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

namespace {

class ExactUcbAgent final : public ProbeAgent {
public:
  ArmDecision decide(const BanditEnv& env, const ProbeContext&, Rng&) override {
    ArmDecision d;
    d.declared_values = ucb_values(env);
    d.chosen_arm = argmax_lowest(d.declared_values);
    return d;
  }
};

class NoisyKnowingAgent final : public ProbeAgent {
public:
  explicit NoisyKnowingAgent(double sigma) : sigma_(sigma) {}
  ArmDecision decide(const BanditEnv& env, const ProbeContext&, Rng& rng) override {
    ArmDecision d;
    d.declared_values = ucb_values(env);
    for (double& v : d.declared_values) v += sigma_ * rng.normal();
    d.chosen_arm = argmax_lowest(d.declared_values);
    return d;
  }

private:
  double sigma_;
};

class GreedyDoingAgent final : public ProbeAgent {
public:
  ArmDecision decide(const BanditEnv& env, const ProbeContext&, Rng&) override {
    ArmDecision d;
    d.declared_values = ucb_values(env);  // knows the bounds perfectly
    d.chosen_arm = argmax_lowest(env.emp_means);  // acts on the greedy estimate
    return d;
  }
};

BanditEnv fresh_env(const ProbeOptions& options, Rng& env_rng) {
  std::vector<double> means(static_cast<std::size_t>(options.n_arms));
  for (double& m : means) m = env_rng.uniform(options.mean_lo, options.mean_hi);
  return BanditEnv(options.n_arms, options.exploration_c, std::move(means));
}

}  // namespace

std::unique_ptr<ProbeAgent> make_exact_ucb_agent() { return std::make_unique<ExactUcbAgent>(); }

std::unique_ptr<ProbeAgent> make_noisy_knowing_agent(double sigma) {
  return std::make_unique<NoisyKnowingAgent>(sigma);
}

std::unique_ptr<ProbeAgent> make_greedy_doing_agent() {
  return std::make_unique<GreedyDoingAgent>();
}

std::int64_t KnowingDoingMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double KnowingDoingMatrix::knowing_rate() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(counts[1][0] + counts[1][1]) / static_cast<double>(n);
}

double KnowingDoingMatrix::doing_rate() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(counts[0][1] + counts[1][1]) / static_cast<double>(n);
}

double KnowingDoingMatrix::doing_given_knowing() const {
  const auto knowing = counts[1][0] + counts[1][1];
  return knowing == 0 ? 0.0 : static_cast<double>(counts[1][1]) / static_cast<double>(knowing);
}

nlohmann::json KnowingDoingMatrix::to_json() const {
  nlohmann::json j;
  j["knowing_false_doing_false"] = counts[0][0];
  j["knowing_false_doing_true"] = counts[0][1];
  j["knowing_true_doing_false"] = counts[1][0];
  j["knowing_true_doing_true"] = counts[1][1];
  j["total"] = total();
  j["knowing_rate"] = knowing_rate();
  j["doing_rate"] = doing_rate();
  j["doing_given_knowing"] = doing_given_knowing();
  return j;
}

KnowingDoingMatrix run_probe(ProbeAgent& agent, const ProbeOptions& options) {
  if (options.n_envs < 1 || options.steps < 1) {
    throw DomainError("probe needs at least one environment and one step");
  }
  KnowingDoingMatrix matrix;
  for (int e = 0; e < options.n_envs; ++e) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(e)));
    BanditEnv env = fresh_env(options, rng);
    env.warm_start(rng);
    for (int s = 0; s < options.steps; ++s) {
      const auto truth = ucb_values(env);
      const int true_arm = argmax_lowest(truth);

      const ArmDecision decision = agent.decide(env, ProbeContext{e, s}, rng);
      if (static_cast<int>(decision.declared_values.size()) != env.n_arms) {
        throw ProtocolError("agent declared " + std::to_string(decision.declared_values.size()) +
                            " values for " + std::to_string(env.n_arms) + " arms");
      }
      const bool knowing = argmax_lowest(decision.declared_values) == true_arm;
      const bool doing = decision.chosen_arm == true_arm;
      matrix.counts[knowing ? 1 : 0][doing ? 1 : 0] += 1;

      env.step(decision.chosen_arm, rng);
    }
  }
  return matrix;
}

std::int64_t count_ucb_greedy_divergence(ProbeAgent& agent, const ProbeOptions& options) {
  std::int64_t divergence = 0;
  for (int e = 0; e < options.n_envs; ++e) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(e)));
    BanditEnv env = fresh_env(options, rng);
    env.warm_start(rng);
    for (int s = 0; s < options.steps; ++s) {
      const int ucb_arm = argmax_lowest(ucb_values(env));
      const int greedy_arm = argmax_lowest(env.emp_means);
      if (ucb_arm != greedy_arm) ++divergence;
      const ArmDecision decision = agent.decide(env, ProbeContext{e, s}, rng);
      env.step(decision.chosen_arm, rng);
    }
  }
  return divergence;
}

}  // namespace draftlab::probes
