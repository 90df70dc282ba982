#include "draftlab/config.hpp"

#include <cmath>
#include <fstream>

#include "draftlab/errors.hpp"
#include "draftlab/router.hpp"

namespace draftlab::config {

namespace {

template <class T>
void read_into(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_object(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " config must be a JSON object");
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

VerifyConfig VerifyConfig::from_json(const nlohmann::json& j) {
  check_object(j, "verify");
  VerifyConfig c;
  read_into(j, "seed", c.seed);
  if (j.contains("trials")) {
    const auto& t = j.at("trials");
    read_into(t, "relative_advantage", c.relative_advantage_trials);
    read_into(t, "cv_inequality", c.cv_trials);
    read_into(t, "variance_bound", c.variance_trials);
    read_into(t, "surrogate_gap", c.surrogate_trials);
    read_into(t, "decomposition_groups", c.decomposition_groups);
    read_into(t, "policy_updates", c.update_trials);
    read_into(t, "entropy_states", c.entropy_states);
  }
  if (j.contains("group_size_range")) {
    const auto range = j.at("group_size_range").get<std::vector<int>>();
    if (range.size() != 2 || range[0] < 2 || range[1] < range[0]) {
      throw ConfigError("group_size_range must be [min>=2, max>=min]");
    }
    c.group_min = range[0];
    c.group_max = range[1];
  }
  read_into(j, "eps", c.eps);
  read_into(j, "threads", c.threads);
  read_into(j, "fault_injection", c.fault_injection);
  if (c.fault_injection != "none" && c.fault_injection != "relative-advantage-part1") {
    throw ConfigError("unknown fault_injection mode: " + c.fault_injection);
  }
  for (int trials : {c.relative_advantage_trials, c.cv_trials, c.variance_trials,
                     c.surrogate_trials, c.decomposition_groups, c.update_trials,
                     c.entropy_states}) {
    if (trials < 0) throw ConfigError("trial counts must be nonnegative");
  }
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("eps must lie in (0,1)");
  if (c.threads < 0) throw ConfigError("threads must be nonnegative");
  return c;
}

nlohmann::json VerifyConfig::resolved() const {
  return {{"seed", seed},
          {"trials",
           {{"relative_advantage", relative_advantage_trials},
            {"cv_inequality", cv_trials},
            {"variance_bound", variance_trials},
            {"surrogate_gap", surrogate_trials},
            {"decomposition_groups", decomposition_groups},
            {"policy_updates", update_trials},
            {"entropy_states", entropy_states}}},
          {"group_size_range", {group_min, group_max}},
          {"eps", eps},
          {"threads", threads},
          {"fault_injection", fault_injection}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  check_object(j, "train");
  TrainConfig c;
  read_into(j, "seed", c.seed);
  read_into(j, "seeds", c.seeds);
  read_into(j, "arms", c.arms);
  if (c.seeds.empty()) throw ConfigError("train config needs at least one seed");
  if (c.arms.empty()) throw ConfigError("train config needs at least one arm");
  for (const auto& arm : c.arms) lab::algorithm_from_string(arm);  // validates names

  if (j.contains("env")) {
    const auto& e = j.at("env");
    read_into(e, "n_locations", c.env.n_locations);
    read_into(e, "n_clusters", c.env.n_clusters);
    read_into(e, "draft_tokens", c.env.draft_tokens);
    read_into(e, "max_draft_tokens", c.env.max_draft_tokens);
    read_into(e, "max_turns", c.env.max_turns);
    read_into(e, "answer_location", c.env.answer_location);
    read_into(e, "draft_conditioning", c.env.draft_conditioning);
  }
  c.env.validate();

  read_into(j, "steps", c.options.steps);
  read_into(j, "group_size", c.options.group_size);
  read_into(j, "learning_rate", c.options.learning_rate);
  read_into(j, "nsm", c.options.negative_sample_masking);
  if (j.contains("offpolicy")) {
    const auto& o = j.at("offpolicy");
    read_into(o, "epochs", c.options.off_policy_epochs);
    read_into(o, "eps_low", c.options.eps_low);
    read_into(o, "eps_high", c.options.eps_high);
  }
  if (j.contains("imitation")) {
    const auto& i = j.at("imitation");
    read_into(i, "epochs", c.imitation.epochs);
    read_into(i, "learning_rate", c.imitation.learning_rate);
    read_into(i, "include_draft", c.imitation.include_draft);
  }
  read_into(j, "expert_count", c.expert_count);
  read_into(j, "expert_locations", c.expert_locations);
  for (int loc : c.expert_locations) {
    if (loc < 0 || loc >= c.env.n_locations) {
      throw ConfigError("expert_locations entry out of range");
    }
  }
  read_into(j, "eval_episodes", c.eval_episodes);
  read_into(j, "eval_seed", c.eval_seed);
  if (c.options.steps < 0) throw ConfigError("steps must be nonnegative");
  if (c.options.group_size < 2) throw ConfigError("group_size must be >= 2");
  if (!(c.options.learning_rate >= 0.0) ||
      !std::isfinite(c.options.learning_rate)) {
    throw ConfigError("learning_rate must be finite and nonnegative");
  }
  if (c.options.off_policy_epochs < 1) throw ConfigError("offpolicy.epochs must be >= 1");
  if (!(c.options.eps_low > 0.0 && c.options.eps_low < 1.0) ||
      !(c.options.eps_high > 0.0 && c.options.eps_high < 1.0)) {
    throw ConfigError("clipping widths must lie in (0,1)");
  }
  if (c.expert_count < 1) throw ConfigError("expert_count must be >= 1");
  if (c.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  return c;
}

nlohmann::json TrainConfig::resolved() const {
  return {{"seed", seed},
          {"seeds", seeds},
          {"arms", arms},
          {"env",
           {{"n_locations", env.n_locations},
            {"n_clusters", env.n_clusters},
            {"draft_tokens", env.draft_tokens},
            {"max_draft_tokens", env.max_draft_tokens},
            {"max_turns", env.max_turns},
            {"answer_location", env.answer_location},
            {"draft_conditioning", env.draft_conditioning}}},
          {"steps", options.steps},
          {"group_size", options.group_size},
          {"learning_rate", options.learning_rate},
          {"nsm", options.negative_sample_masking},
          {"offpolicy",
           {{"epochs", options.off_policy_epochs},
            {"eps_low", options.eps_low},
            {"eps_high", options.eps_high}}},
          {"imitation",
           {{"epochs", imitation.epochs},
            {"learning_rate", imitation.learning_rate},
            {"include_draft", imitation.include_draft}}},
          {"expert_count", expert_count},
          {"expert_locations", expert_locations},
          {"eval_episodes", eval_episodes},
          {"eval_seed", eval_seed}};
}

ProbeConfig ProbeConfig::from_json(const nlohmann::json& j) {
  check_object(j, "probe");
  ProbeConfig c;
  read_into(j, "seed", c.options.seed);
  read_into(j, "n_envs", c.options.n_envs);
  read_into(j, "steps", c.options.steps);
  read_into(j, "n_arms", c.options.n_arms);
  read_into(j, "exploration_c", c.options.exploration_c);
  read_into(j, "agent", c.agent);
  read_into(j, "noise_sigma", c.noise_sigma);
  read_into(j, "transcript", c.transcript);
  if (c.agent != "exact-ucb" && c.agent != "noisy-knowing" && c.agent != "greedy-doing" &&
      c.agent != "replay") {
    throw ConfigError("unknown probe agent: " + c.agent);
  }
  if (c.agent == "replay" && c.transcript.empty()) {
    throw ConfigError("replay agent needs a transcript path");
  }
  if (c.options.n_envs < 1 || c.options.steps < 1) {
    throw ConfigError("probe needs n_envs >= 1 and steps >= 1");
  }
  if (c.options.n_arms < 2) throw ConfigError("probe needs at least two arms");
  if (c.options.exploration_c < 0.0) throw ConfigError("exploration_c must be nonnegative");
  if (c.noise_sigma < 0.0) throw ConfigError("noise_sigma must be nonnegative");
  return c;
}

nlohmann::json ProbeConfig::resolved() const {
  return {{"seed", options.seed},
          {"n_envs", options.n_envs},
          {"steps", options.steps},
          {"n_arms", options.n_arms},
          {"exploration_c", options.exploration_c},
          {"agent", agent},
          {"noise_sigma", noise_sigma},
          {"transcript", transcript}};
}

EvalConfig EvalConfig::from_json(const nlohmann::json& j) {
  check_object(j, "eval");
  EvalConfig c;
  read_into(j, "max_turns", c.max_turns);
  read_into(j, "threshold", c.threshold);
  read_into(j, "stub_judge", c.stub_judge);
  read_into(j, "stub_seed", c.stub_seed);
  if (c.max_turns < 1) throw ConfigError("max_turns must be >= 1");
  if (!(c.threshold > 0.0 && c.threshold <= 1.0)) {
    throw ConfigError("threshold must lie in (0,1]");
  }
  if (j.contains("routes")) {
    c.routes = j.at("routes");
    router::RouteTable::from_json(*c.routes);  // validate eagerly
  }
  if (j.contains("judge")) {
    const auto& g = j.at("judge");
    read_into(g, "endpoint", c.judge.endpoint);
    read_into(g, "model", c.judge.model);
    read_into(g, "timeout_ms", c.judge.timeout_ms);
    read_into(g, "credential_env", c.judge.credential_env);
    read_into(g, "max_in_flight", c.judge.max_in_flight);
  }
  return c;
}

nlohmann::json EvalConfig::resolved() const {
  nlohmann::json j = {{"max_turns", max_turns},
                      {"threshold", threshold},
                      {"stub_judge", stub_judge},
                      {"stub_seed", stub_seed},
                      {"judge",
                       {{"endpoint", judge.endpoint},
                        {"model", judge.model},
                        {"timeout_ms", judge.timeout_ms},
                        {"credential_env", judge.credential_env},
                        {"max_in_flight", judge.max_in_flight}}}};
  if (routes.has_value()) j["routes"] = *routes;
  return j;
}

}  // namespace draftlab::config
