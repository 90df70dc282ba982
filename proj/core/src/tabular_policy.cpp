#include "draftlab/tabular_policy.hpp"

#include <algorithm>
#include <cmath>

#include "draftlab/errors.hpp"

namespace draftlab::policy {

TabularPolicy::TabularPolicy(std::vector<int> actions_per_state) {
  if (actions_per_state.empty()) {
    throw DomainError("policy needs at least one state");
  }
  theta_.reserve(actions_per_state.size());
  for (int n : actions_per_state) {
    if (n < 2) throw DomainError("every state needs at least two actions");
    theta_.emplace_back(static_cast<std::size_t>(n), 0.0);
  }
}

void TabularPolicy::check_state(int state) const {
  if (state < 0 || state >= state_count()) {
    throw LookupError("unknown state id " + std::to_string(state));
  }
}

int TabularPolicy::action_count(int state) const {
  check_state(state);
  return static_cast<int>(theta_[state].size());
}

double TabularPolicy::parameter(int state, int action) const {
  check_state(state);
  if (action < 0 || action >= action_count(state)) {
    throw LookupError("unknown action id " + std::to_string(action));
  }
  return theta_[state][action];
}

void TabularPolicy::set_parameter(int state, int action, double value) {
  check_state(state);
  if (action < 0 || action >= action_count(state)) {
    throw LookupError("unknown action id " + std::to_string(action));
  }
  theta_[state][action] = value;
}

std::vector<double> TabularPolicy::distribution(int state) const {
  check_state(state);
  const auto& row = theta_[state];
  const double shift = *std::max_element(row.begin(), row.end());
  std::vector<double> probs(row.size());
  double z = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    probs[a] = std::exp(row[a] - shift);
    z += probs[a];
  }
  for (double& p : probs) p /= z;
  return probs;
}

double TabularPolicy::log_prob(int state, int action) const {
  check_state(state);
  const auto& row = theta_[state];
  if (action < 0 || action >= static_cast<int>(row.size())) {
    throw LookupError("unknown action id " + std::to_string(action));
  }
  const double shift = *std::max_element(row.begin(), row.end());
  double z = 0.0;
  for (double v : row) z += std::exp(v - shift);
  return row[action] - shift - std::log(z);
}

double TabularPolicy::entropy(int state) const {
  const auto probs = distribution(state);
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void TabularPolicy::apply(const ParamTable& delta, double scale) {
  if (delta.size() != theta_.size()) throw ShapeError("delta table has wrong state count");
  for (std::size_t s = 0; s < theta_.size(); ++s) {
    if (delta[s].size() != theta_[s].size()) {
      throw ShapeError("delta table has wrong action count at state " + std::to_string(s));
    }
    for (std::size_t a = 0; a < theta_[s].size(); ++a) {
      theta_[s][a] += scale * delta[s][a];
    }
  }
}

bool TabularPolicy::finite() const {
  for (const auto& row : theta_) {
    for (double v : row) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ParamTable zero_like(const TabularPolicy& policy) {
  ParamTable table(policy.raw().size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    table[s].assign(policy.raw()[s].size(), 0.0);
  }
  return table;
}

double max_abs_difference(const ParamTable& a, const ParamTable& b) {
  if (a.size() != b.size()) throw ShapeError("tables differ in state count");
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s].size() != b[s].size()) throw ShapeError("tables differ in action count");
    for (std::size_t i = 0; i < a[s].size(); ++i) {
      worst = std::max(worst, std::abs(a[s][i] - b[s][i]));
    }
  }
  return worst;
}

ParamTable single_step_update(const TabularPolicy& policy, int state, int chosen_action,
                              double advantage, double learning_rate) {
  if (learning_rate <= 0.0) throw DomainError("learning rate must be positive");
  ParamTable delta = zero_like(policy);
  const auto probs = policy.distribution(state);
  if (chosen_action < 0 || chosen_action >= static_cast<int>(probs.size())) {
    throw LookupError("unknown action id " + std::to_string(chosen_action));
  }
  auto& row = delta[state];
  double others = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (static_cast<int>(a) == chosen_action) continue;
    row[a] = -learning_rate * probs[a] * advantage;
    others += row[a];
  }
  // 1 - pi(chosen) equals the probability mass of the other actions, so the
  // chosen entry is their negated sum and the row cancels bit-exactly.
  row[chosen_action] = -others;
  return delta;
}

double update_row_sum(const ParamTable& delta, int state, int chosen_action) {
  const auto& row = delta.at(static_cast<std::size_t>(state));
  double sum = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (static_cast<int>(a) == chosen_action) continue;
    sum += row[a];
  }
  return sum + row[static_cast<std::size_t>(chosen_action)];
}

EntropyDelta entropy_delta_check(const TabularPolicy& policy, int state,
                                 const std::vector<double>& delta_row, double learning_rate) {
  const auto probs = policy.distribution(state);
  if (delta_row.size() != probs.size()) {
    throw ShapeError("delta row does not match the state's action count");
  }

  TabularPolicy moved = policy;
  for (std::size_t a = 0; a < delta_row.size(); ++a) {
    moved.raw()[state][a] += learning_rate * delta_row[a];
  }

  EntropyDelta out;
  out.exact = moved.entropy(state) - policy.entropy(state);

  double mean_logpi = 0.0;
  double mean_delta = 0.0;
  std::vector<double> logpi(probs.size());
  for (std::size_t a = 0; a < probs.size(); ++a) {
    logpi[a] = std::log(probs[a]);
    mean_logpi += probs[a] * logpi[a];
    mean_delta += probs[a] * learning_rate * delta_row[a];
  }
  double cov = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cov += probs[a] * (logpi[a] - mean_logpi) * (learning_rate * delta_row[a] - mean_delta);
  }
  out.approx = -cov;
  return out;
}

}  // namespace draftlab::policy
