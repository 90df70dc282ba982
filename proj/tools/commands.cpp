#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>

#include "draftlab/config.hpp"
#include "draftlab/errors.hpp"
#include "draftlab/evaluators.hpp"
#include "draftlab/gradients.hpp"
#include "draftlab/report.hpp"
#include "draftlab/router.hpp"
#include "draftlab/trajectory_log.hpp"
#include "draftlab/verify.hpp"

namespace draftlab::cli {

namespace {

namespace fs = std::filesystem;

void write_outputs(const io::RunReport& report, const std::string& out_dir,
                   const std::string& stem) {
  std::cout << report.render_text();
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  {
    std::ofstream json_out(fs::path(out_dir) / (stem + ".json"));
    json_out << report.to_json().dump(2) << "\n";
  }
  {
    std::ofstream text_out(fs::path(out_dir) / (stem + ".txt"));
    text_out << report.render_text();
  }
}

nlohmann::json load_or_default(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  return config::load_json_file(path);
}

/// Replays externally produced probe transcripts: one JSON object per line
/// with env, step, values, arm.
class ReplayAgent final : public probes::ProbeAgent {
public:
  explicit ReplayAgent(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read transcript: " + path);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
        probes::ArmDecision decision;
        decision.declared_values = j.at("values").get<std::vector<double>>();
        decision.chosen_arm = j.at("arm").get<int>();
        records_[{j.at("env").get<int>(), j.at("step").get<int>()}] = std::move(decision);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed transcript line " + std::to_string(line_number) + ": " +
                          e.what());
      }
    }
  }

  probes::ArmDecision decide(const probes::BanditEnv&, const probes::ProbeContext& context,
                             Rng&) override {
    const auto it = records_.find({context.env_index, context.step_index});
    if (it == records_.end()) {
      throw ConfigError("transcript has no record for env " +
                        std::to_string(context.env_index) + " step " +
                        std::to_string(context.step_index));
    }
    return it->second;
  }

private:
  std::map<std::pair<int, int>, probes::ArmDecision> records_;
};

}  // namespace

int cmd_verify(const CommonArgs& args) {
  config::VerifyConfig cfg;
  try {
    cfg = config::VerifyConfig::from_json(load_or_default(args.config_path));
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (args.seed.has_value()) cfg.seed = *args.seed;

  const auto summary = verify::run_battery(cfg);
  for (const auto& check : summary.checks) {
    std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name << "  trials="
              << check.trials << " violations=" << check.violations << "\n";
  }

  io::RunReport report("verify", cfg.resolved(), cfg.seed);
  report.set_field("all_pass", summary.all_pass());
  report.set_field("total_trials", summary.total_trials());
  report.add_table("property_battery", "verify", summary.to_json());
  write_outputs(report, args.out_dir, "verify_report");
  return summary.all_pass() ? kExitOk : kExitViolation;
}

int cmd_train(const CommonArgs& args) {
  config::TrainConfig cfg;
  try {
    cfg = config::TrainConfig::from_json(load_or_default(args.config_path));
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (args.seed.has_value()) {
    cfg.seed = *args.seed;
    cfg.seeds = {*args.seed};
  }

  // One fixed question per command invocation.
  lab::DraftWorldConfig env = cfg.env;
  if (env.answer_location < 0) {
    Rng rng(derive_seed(cfg.seed, 0xA));
    env.answer_location = rng.uniform_int(0, env.n_locations - 1);
  }

  std::vector<int> demo_locations = cfg.expert_locations;
  if (demo_locations.empty()) demo_locations.push_back(env.answer_location);
  std::vector<lab::Trajectory> experts;
  for (int i = 0; i < cfg.expert_count; ++i) {
    experts.push_back(lab::expert_demonstration(
        env, demo_locations[static_cast<std::size_t>(i) % demo_locations.size()]));
  }

  io::RunReport report("train", cfg.resolved(), cfg.seed);
  report.set_field("answer_location", env.answer_location);
  if (!args.out_dir.empty()) fs::create_directories(args.out_dir);

  // Runs share no mutable state, so arms x seeds execute concurrently; rows
  // are collected in submission order to keep the report deterministic.
  struct RunOutcome {
    nlohmann::json row;
    bool failed = false;
  };
  auto execute_run = [&](const std::string& arm_name, std::uint64_t seed) -> RunOutcome {
    const lab::Algorithm algorithm = lab::algorithm_from_string(arm_name);
    const auto imitated = lab::dtft_imitation(experts, env.make_policy(), cfg.imitation);
    const auto baseline = lab::evaluate_policy(env, imitated.policy, cfg.eval_episodes,
                                               cfg.eval_seed);

    lab::TrainOptions options = cfg.options;
    options.seed = seed;
    RunOutcome outcome;
    outcome.row["seed"] = seed;
    outcome.row["baseline_avg"] = baseline.avg;
    outcome.row["baseline_mean_turns"] = baseline.mean_turns;
    outcome.row["baseline_i_avg"] = baseline.i_avg;
    outcome.row["baseline_valid_answer_rate"] = baseline.valid_answer_rate;
    if (options.steps == 0) return outcome;  // imitation baseline only

    try {
      const auto trained = lab::train(algorithm, env, imitated.policy, options);
      const auto final_eval = lab::evaluate_policy(env, trained.policy, cfg.eval_episodes,
                                                   cfg.eval_seed);
      outcome.row["final_avg"] = final_eval.avg;
      outcome.row["final_mean_turns"] = final_eval.mean_turns;
      outcome.row["final_i_avg"] = final_eval.i_avg;
      outcome.row["final_valid_answer_rate"] = final_eval.valid_answer_rate;
      outcome.row["turns_improved"] = final_eval.mean_turns <= baseline.mean_turns;

      if (!args.out_dir.empty() && !trained.log.entries.empty()) {
        const std::string curve_name = arm_name + "_seed" + std::to_string(seed) + "_curve.tsv";
        std::ofstream tsv(fs::path(args.out_dir) / curve_name);
        tsv << trained.log.to_tsv();
        outcome.row["curve_file"] = curve_name;
      }
    } catch (const Error& e) {
      // divergence or any other per-run failure: record it, let peers proceed
      outcome.row["failed"] = e.what();
      outcome.failed = true;
    }
    return outcome;
  };

  std::vector<std::future<RunOutcome>> pending;
  pending.reserve(cfg.arms.size() * cfg.seeds.size());
  for (const auto& arm_name : cfg.arms) {
    for (const std::uint64_t seed : cfg.seeds) {
      pending.push_back(std::async(std::launch::async, execute_run, arm_name, seed));
    }
  }

  int failed_runs = 0;
  int total_runs = 0;
  nlohmann::json failures = nlohmann::json::array();
  std::size_t next = 0;
  for (const auto& arm_name : cfg.arms) {
    nlohmann::json rows = nlohmann::json::array();
    for (const std::uint64_t seed : cfg.seeds) {
      ++total_runs;
      RunOutcome outcome = pending[next++].get();
      if (outcome.failed) {
        ++failed_runs;
        failures.push_back({{"arm", arm_name}, {"seed", seed},
                            {"error", outcome.row["failed"]}});
      }
      rows.push_back(std::move(outcome.row));
    }
    report.add_table(arm_name, "policy", rows);
  }

  if (!failures.empty()) report.set_field("failed_runs", failures);
  write_outputs(report, args.out_dir, "train_report");
  return failed_runs == total_runs ? kExitViolation : kExitOk;
}

int cmd_eval(const CommonArgs& args, const std::string& log_path) {
  config::EvalConfig cfg;
  try {
    cfg = config::EvalConfig::from_json(load_or_default(args.config_path));
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (args.stub_judge) cfg.stub_judge = true;

  io::LogReadResult log;
  try {
    log = io::read_log(log_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (log.total_lines == 0) {
    std::cerr << "error: trajectory log is empty: " << log_path << "\n";
    return kExitUsage;
  }
  if (log.records.empty()) {
    std::cerr << "error: no parseable records in " << log_path << " ("
              << log.skipped.size() << " skipped)\n";
    for (const auto& [line, reason] : log.skipped) {
      std::cerr << "  line " << line << ": " << reason << "\n";
    }
    return kExitUsage;
  }

  const router::RouteTable routes = cfg.routes.has_value()
                                        ? router::RouteTable::from_json(*cfg.routes)
                                        : router::RouteTable::builtin();

  // Judge resolution: the stub when requested, a live endpoint when
  // configured, and otherwise a client that refuses — judge-backed records
  // then carry per-record errors instead of being silently scored.
  class NoJudge final : public router::JudgeClient {
  public:
    double verdict(const router::JudgeRequest&) override {
      throw JudgeUnavailableError("no judge configured: pass --stub-judge or set judge.endpoint");
    }
    std::uint64_t external_calls() const override { return 0; }
  };
  router::StubJudgeClient stub(cfg.stub_seed);
  NoJudge no_judge;
  std::unique_ptr<router::JudgeClient> http;
  router::JudgeClient* judge_ptr = &no_judge;
  if (cfg.stub_judge) {
    judge_ptr = &stub;
  } else if (!cfg.judge.endpoint.empty()) {
    http = router::make_http_judge(cfg.judge);
    judge_ptr = http.get();
  }
  router::JudgeClient& judge_ref = *judge_ptr;

  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json errors = nlohmann::json::array();
  double score_sum = 0.0;
  double turn_sum = 0.0;
  int terminal_count = 0;
  int scored = 0;
  double repetition_sum = 0.0;
  double repetition_min = 0.0;

  for (const auto& record : log.records) {
    nlohmann::json row;
    row["question_id"] = record.question_id;
    row["turns"] = record.turn_count();
    turn_sum += record.turn_count();
    if (record.terminal()) ++terminal_count;

    double repetition = 0.0;
    if (!record.turns.empty()) {
      repetition = probes::repetition_score(record.actions());
      repetition_sum += repetition;
      repetition_min = std::min(repetition_min, repetition);
    }
    row["repetition_score"] = repetition;

    const router::EvalSpec spec = routes.route(record.category, record.answer_format);
    row["eval_kind"] = router::to_string(spec.kind);
    try {
      const auto outcome = router::evaluate(spec, record.final_answer, record.golden_answer,
                                            judge_ref);
      const int binary = router::binarize(outcome.score, cfg.threshold);
      row["score"] = outcome.score;
      row["binary"] = binary;
      score_sum += binary;
      ++scored;
    } catch (const Error& e) {
      row["error"] = e.what();
      errors.push_back({{"question_id", record.question_id}, {"error", e.what()}});
    }
    rows.push_back(std::move(row));
  }

  const auto n_records = static_cast<double>(log.records.size());
  const double avg = scored > 0 ? 100.0 * score_sum / scored : 0.0;
  const double mean_turns = turn_sum / n_records;
  const double i_avg_value = probes::i_avg(avg, std::min(mean_turns,
                                                         static_cast<double>(cfg.max_turns)),
                                           cfg.max_turns);

  io::RunReport report("eval", cfg.resolved(), cfg.stub_seed);
  report.set_field("input_lines", log.total_lines);
  report.set_field("parsed_records", static_cast<int>(log.records.size()));
  report.set_field("skipped_lines", static_cast<int>(log.skipped.size()));
  report.set_field("counts_conserved",
                   static_cast<int>(log.records.size() + log.skipped.size()) == log.total_lines);

  nlohmann::json aggregate;
  aggregate["avg"] = avg;
  aggregate["i_avg"] = i_avg_value;
  aggregate["max_turns"] = cfg.max_turns;
  aggregate["mean_turns"] = mean_turns;
  aggregate["valid_answer_rate"] = static_cast<double>(terminal_count) / n_records;
  aggregate["scored_records"] = scored;
  aggregate["error_records"] = static_cast<int>(errors.size());
  aggregate["mean_repetition_score"] = repetition_sum / n_records;
  aggregate["min_repetition_score"] = repetition_min;
  report.add_table("aggregate", "router", aggregate);
  report.add_table("records", "router", rows);
  if (!errors.empty()) report.add_table("errors", "router", errors);
  if (!log.skipped.empty()) {
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& [line, reason] : log.skipped) {
      skipped.push_back({{"line", line}, {"reason", reason}});
    }
    report.add_table("skipped", "cli", skipped);
  }

  write_outputs(report, args.out_dir, "eval_report");
  return kExitOk;
}

int cmd_probe(const CommonArgs& args) {
  config::ProbeConfig cfg;
  try {
    cfg = config::ProbeConfig::from_json(load_or_default(args.config_path));
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (args.seed.has_value()) cfg.options.seed = *args.seed;

  std::unique_ptr<probes::ProbeAgent> agent;
  try {
    if (cfg.agent == "exact-ucb") {
      agent = probes::make_exact_ucb_agent();
    } else if (cfg.agent == "noisy-knowing") {
      agent = probes::make_noisy_knowing_agent(cfg.noise_sigma);
    } else if (cfg.agent == "greedy-doing") {
      agent = probes::make_greedy_doing_agent();
    } else {
      agent = std::make_unique<ReplayAgent>(cfg.transcript);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  probes::KnowingDoingMatrix matrix;
  try {
    matrix = probes::run_probe(*agent, cfg.options);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  io::RunReport report("probe", cfg.resolved(), cfg.options.seed);
  report.set_field("n_envs", cfg.options.n_envs);
  report.set_field("steps", cfg.options.steps);
  report.set_field("agent", cfg.agent);
  report.add_table("knowing_doing", "probes", matrix.to_json());
  write_outputs(report, args.out_dir, "probe_report");
  return kExitOk;
}

int cmd_report(const std::string& report_path) {
  try {
    const auto document = config::load_json_file(report_path);
    std::cout << io::RunReport::render_file(document);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace draftlab::cli
