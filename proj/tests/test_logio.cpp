#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "draftlab/config.hpp"
#include "draftlab/errors.hpp"
#include "draftlab/report.hpp"
#include "draftlab/trajectory_log.hpp"
#include "draftlab/version.hpp"

using namespace draftlab;
using namespace draftlab::io;

namespace {

TrajectoryLogRecord sample_record() {
  TrajectoryLogRecord record;
  record.question_id = "q-001";
  record.category = "text";
  record.answer_format = "python string";
  record.draft = DraftRecord{"retrieve then answer", {-0.1, -0.3}};
  record.turns.push_back({"look for it",
                          {"ClassicRetrieve", {{"query", "main components"}, {"limit", 5}}},
                          "chunk hit"});
  record.turns.push_back({"emit", {"GenerateAnswer", {{"answer", "Transformer"}}}, "done"});
  record.final_answer = "Transformer";
  record.golden_answer = "Transformer";
  return record;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = (std::filesystem::temp_directory_path() /
            ("draftlab_log_" + std::to_string(std::random_device{}()) + ".jsonl"))
               .string();
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("records round-trip through the line format") {
  const auto record = sample_record();
  const auto line = serialize_record(record);
  const auto parsed = parse_record(line);
  CHECK(parsed.question_id == record.question_id);
  CHECK(parsed.category == record.category);
  CHECK(parsed.turns.size() == 2);
  CHECK(parsed.terminal());
  CHECK(parsed.draft->token_logprobs.size() == 2);
  CHECK(serialize_record(parsed) == line);
}

TEST_CASE("record invariants") {
  SUBCASE("unknown action names are rejected") {
    auto record = sample_record();
    record.turns[0].action.name = "Teleport";
    CHECK_THROWS_AS(serialize_record(record), ConfigError);
    record.turns[0].action.name = "ext:Teleport";  // extension namespace is fine
    CHECK_NOTHROW(serialize_record(record));
  }

  SUBCASE("GenerateAnswer must be unique and last") {
    auto record = sample_record();
    record.turns.push_back({"again", {"GenerateAnswer", {{"answer", "x"}}}, "done"});
    CHECK_THROWS_AS(serialize_record(record), ConfigError);

    auto misplaced = sample_record();
    std::swap(misplaced.turns[0], misplaced.turns[1]);
    CHECK_THROWS_AS(serialize_record(misplaced), ConfigError);
  }

  SUBCASE("positive draft log-probabilities are rejected") {
    auto record = sample_record();
    record.draft->token_logprobs = {0.2};
    CHECK_THROWS_AS(serialize_record(record), ConfigError);
  }

  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(parse_record("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_record("[1,2,3]"), ConfigError);
    CHECK_THROWS_AS(parse_record("{\"category\":\"text\"}"), ConfigError);  // missing fields
  }

  SUBCASE("unsupported version") {
    auto j = nlohmann::json::parse(serialize_record(sample_record()));
    j["version"] = 99;
    CHECK_THROWS_AS(parse_record(j.dump()), ConfigError);
  }
}

TEST_CASE("log reading keeps malformed-line accounting") {
  const auto good = serialize_record(sample_record());
  TempFile file(good + "\n" + "{broken\n" + "\n" + good + "\n");
  const auto result = read_log(file.path);
  CHECK(result.total_lines == 3);  // blank line ignored
  CHECK(result.records.size() == 2);
  CHECK(result.skipped.size() == 1);
  CHECK(result.skipped[0].first == 2);
  CHECK(static_cast<int>(result.records.size() + result.skipped.size()) == result.total_lines);

  CHECK_THROWS_AS(read_log("/nonexistent/path.jsonl"), ConfigError);
}

TEST_CASE("report payload hashing") {
  const nlohmann::json cfg = {{"alpha", 1}, {"beta", "two"}};
  RunReport report("probe", cfg, 7);
  report.set_field("n_envs", 64);
  report.add_table("knowing_doing", "probes", {{"total", 3200}});

  SUBCASE("hash covers the payload and nothing else") {
    const auto doc = report.to_json();
    CHECK(doc.contains("meta"));
    CHECK(doc.at("meta").contains("timestamp"));
    CHECK(doc.at("payload_hash") == report.payload_hash());
    // identical payloads hash identically regardless of construction time
    RunReport again("probe", cfg, 7);
    again.set_field("n_envs", 64);
    again.add_table("knowing_doing", "probes", {{"total", 3200}});
    CHECK(again.payload_hash() == report.payload_hash());
  }

  SUBCASE("render verifies the stored hash") {
    auto doc = report.to_json();
    CHECK_NOTHROW(RunReport::render_file(doc));
    doc["payload"]["seed"] = 8;
    CHECK_THROWS_AS(RunReport::render_file(doc), ConfigError);
  }

  SUBCASE("tables carry module labels") {
    const auto& table = report.payload().at("tables").at("knowing_doing");
    CHECK(table.at("module") == "probes");
    CHECK(table.at("module_version").get<std::string>() == std::string(draftlab::kVersion));
  }

  SUBCASE("config hash is order-insensitive via canonical dump") {
    nlohmann::json reordered;
    reordered["beta"] = "two";
    reordered["alpha"] = 1;
    CHECK(config_hash(cfg) == config_hash(reordered));
    CHECK(config_hash(cfg) != config_hash({{"alpha", 2}, {"beta", "two"}}));
  }
}

TEST_CASE("every shipped config file parses and validates") {
  const std::filesystem::path dir = std::filesystem::path(DRAFTLAB_SOURCE_DIR) / "configs";
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const auto doc = config::load_json_file(entry.path().string());
    const std::string name = entry.path().filename().string();
    if (name.rfind("train", 0) == 0) {
      CHECK_NOTHROW(config::TrainConfig::from_json(doc));
    } else if (name.rfind("probe", 0) == 0) {
      CHECK_NOTHROW(config::ProbeConfig::from_json(doc));
    } else if (name.rfind("eval", 0) == 0) {
      CHECK_NOTHROW(config::EvalConfig::from_json(doc));
    } else if (name.rfind("verify", 0) == 0) {
      CHECK_NOTHROW(config::VerifyConfig::from_json(doc));
    }
  }
  CHECK(seen >= 6);
}

TEST_CASE("command configs load, validate, and resolve deterministically") {
  SUBCASE("verify config") {
    const auto cfg = config::VerifyConfig::from_json(
        {{"seed", 42}, {"trials", {{"relative_advantage", 500}}}, {"fault_injection", "relative-advantage-part1"}});
    CHECK(cfg.seed == 42);
    CHECK(cfg.relative_advantage_trials == 500);
    CHECK(cfg.cv_trials == 100000);  // untouched default
    CHECK_THROWS_AS(
        config::VerifyConfig::from_json({{"fault_injection", "made-up"}}), ConfigError);
    CHECK_THROWS_AS(config::VerifyConfig::from_json({{"group_size_range", {1, 4}}}), ConfigError);
    CHECK_THROWS_AS(config::VerifyConfig::from_json({{"trials", {{"cv_inequality", -5}}}}),
                    ConfigError);
    CHECK_THROWS_AS(config::VerifyConfig::from_json({{"eps", 1.5}}), ConfigError);
    CHECK(config_hash(cfg.resolved()) ==
          config_hash(config::VerifyConfig::from_json(
                          {{"seed", 42},
                           {"trials", {{"relative_advantage", 500}}},
                           {"fault_injection", "relative-advantage-part1"}})
                          .resolved()));
  }

  SUBCASE("train config") {
    const auto cfg = config::TrainConfig::from_json(
        {{"arms", {"dfpo"}}, {"seeds", {1, 2}}, {"env", {{"answer_location", 4}}}});
    CHECK(cfg.arms.size() == 1);
    CHECK(cfg.env.answer_location == 4);
    CHECK_THROWS_AS(config::TrainConfig::from_json({{"arms", {"sarsa"}}}), ConfigError);
    CHECK_THROWS_AS(config::TrainConfig::from_json({{"seeds", nlohmann::json::array()}}),
                    ConfigError);
    CHECK_THROWS_AS(config::TrainConfig::from_json({{"steps", -1}}), ConfigError);
    CHECK_THROWS_AS(config::TrainConfig::from_json({{"learning_rate", -0.5}}), ConfigError);
    CHECK_THROWS_AS(config::TrainConfig::from_json({{"group_size", 1}}), ConfigError);
    CHECK_THROWS_AS(config::TrainConfig::from_json({{"expert_locations", {99}}}), ConfigError);
  }

  SUBCASE("probe config") {
    const auto cfg = config::ProbeConfig::from_json({{"agent", "greedy-doing"}, {"steps", 10}});
    CHECK(cfg.options.steps == 10);
    CHECK(cfg.options.n_envs == 64);  // default
    CHECK_THROWS_AS(config::ProbeConfig::from_json({{"agent", "psychic"}}), ConfigError);
    CHECK_THROWS_AS(config::ProbeConfig::from_json({{"agent", "replay"}}), ConfigError);
  }

  SUBCASE("eval config") {
    const auto cfg = config::EvalConfig::from_json(
        {{"max_turns", 12}, {"judge", {{"endpoint", "http://judge.local/v1"},
                                       {"credential_env", "JUDGE_KEY"}}}});
    CHECK(cfg.max_turns == 12);
    CHECK(cfg.judge.credential_env == "JUDGE_KEY");
    CHECK_THROWS_AS(config::EvalConfig::from_json({{"max_turns", 0}}), ConfigError);
    CHECK_THROWS_AS(
        config::EvalConfig::from_json({{"routes", {{"version", 1}, {"routes", 3}}}}),
        ConfigError);
  }
}
