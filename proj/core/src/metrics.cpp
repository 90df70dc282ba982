#include "draftlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "draftlab/errors.hpp"

namespace draftlab::probes {

double i_avg(double avg, double mean_turns, int max_turns) {
  if (max_turns < 1) throw DomainError("max_turns must be >= 1");
  if (avg < 0.0) throw DomainError("avg must be nonnegative");
  if (mean_turns < 0.0) throw DomainError("mean_turns must be nonnegative");
  if (mean_turns > static_cast<double>(max_turns)) {
    throw DomainError("mean_turns exceeds max_turns");
  }
  return avg * std::sqrt(1.0 - mean_turns / static_cast<double>(max_turns));
}

double repetition_score(const std::vector<ActionRecord>& actions) {
  if (actions.empty()) throw DomainError("repetition score needs at least one action");
  std::map<std::string, int> groups;
  int largest = 0;
  for (const auto& action : actions) {
    largest = std::max(largest, ++groups[action.identity_key()]);
  }
  if (largest == 1) return 0.0;
  return -0.1 * static_cast<double>(largest - 1);
}

double valid_answer_rate(const std::vector<lab::Trajectory>& trajectories) {
  if (trajectories.empty()) throw DomainError("valid answer rate needs trajectories");
  int terminal = 0;
  for (const auto& traj : trajectories) {
    if (traj.terminal) ++terminal;
  }
  return static_cast<double>(terminal) / static_cast<double>(trajectories.size());
}

nlohmann::json EfficiencyReport::to_json() const {
  nlohmann::json j;
  j["avg"] = avg;
  j["mean_turns"] = mean_turns;
  j["max_turns"] = max_turns;
  j["i_avg"] = i_avg;
  j["valid_answer_rate"] = valid_answer_rate;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [turns, count] : turn_histogram) {
    hist[std::to_string(turns)] = count;
  }
  j["turn_histogram"] = hist;
  return j;
}

EfficiencyReport efficiency_report(const std::vector<lab::Trajectory>& trajectories,
                                   const std::vector<double>& solution_rewards, int max_turns) {
  if (trajectories.size() != solution_rewards.size()) {
    throw ShapeError("reward vector does not match trajectory count");
  }
  if (trajectories.empty()) throw DomainError("efficiency report needs trajectories");

  EfficiencyReport report;
  report.max_turns = max_turns;
  double reward_sum = 0.0;
  double turn_sum = 0.0;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    reward_sum += solution_rewards[i];
    turn_sum += trajectories[i].turn_count();
    ++report.turn_histogram[trajectories[i].turn_count()];
  }
  const double n = static_cast<double>(trajectories.size());
  report.avg = 100.0 * reward_sum / n;
  report.mean_turns = turn_sum / n;
  report.valid_answer_rate = valid_answer_rate(trajectories);
  report.i_avg = i_avg(report.avg, report.mean_turns, max_turns);
  return report;
}

}  // namespace draftlab::probes
