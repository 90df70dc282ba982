#include "draftlab/trajectory_log.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "draftlab/errors.hpp"

namespace draftlab::io {

namespace {

const std::set<std::string>& action_alphabet() {
  static const std::set<std::string> names = {
      "RetrieveFromVectorstore", "ClassicRetrieve", "RetrieveFromDatabase",
      "ViewImage",               "CalculateExpr",   "GenerateAnswer",
  };
  return names;
}

bool valid_action_name(const std::string& name) {
  return action_alphabet().count(name) > 0 || name.rfind("ext:", 0) == 0;
}

void validate(const TrajectoryLogRecord& record) {
  int generate_answer = 0;
  for (std::size_t i = 0; i < record.turns.size(); ++i) {
    const auto& action = record.turns[i].action;
    if (!valid_action_name(action.name)) {
      throw ConfigError("unknown action name: " + action.name);
    }
    if (action.name == "GenerateAnswer") {
      ++generate_answer;
      if (i + 1 != record.turns.size()) {
        throw ConfigError("GenerateAnswer must be the last action");
      }
    }
  }
  if (generate_answer > 1) {
    throw ConfigError("at most one GenerateAnswer per record");
  }
  if (record.draft.has_value()) {
    for (double lp : record.draft->token_logprobs) {
      if (lp > 0.0) throw ConfigError("draft log-probabilities must be <= 0");
    }
  }
  if (!answer::is_valid(record.final_answer) || !answer::is_valid(record.golden_answer)) {
    throw ConfigError("answers must be bool/int/real/text/list/mapping values");
  }
}

}  // namespace

bool TrajectoryLogRecord::terminal() const {
  return !turns.empty() && turns.back().action.name == "GenerateAnswer";
}

std::vector<ActionRecord> TrajectoryLogRecord::actions() const {
  std::vector<ActionRecord> out;
  out.reserve(turns.size());
  for (const auto& turn : turns) out.push_back(turn.action);
  return out;
}

TrajectoryLogRecord parse_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("record must be a JSON object");
  try {
    if (j.value("version", kTrajectoryLogVersion) != kTrajectoryLogVersion) {
      throw ConfigError("unsupported record version");
    }
    TrajectoryLogRecord record;
    record.question_id = j.at("question_id").get<std::string>();
    record.category = j.value("category", std::string("unknown"));
    record.answer_format = j.value("answer_format", std::string());
    if (j.contains("draft") && !j.at("draft").is_null()) {
      DraftRecord draft;
      draft.text = j.at("draft").value("text", std::string());
      if (j.at("draft").contains("token_logprobs")) {
        draft.token_logprobs = j.at("draft").at("token_logprobs").get<std::vector<double>>();
      }
      record.draft = std::move(draft);
    }
    for (const auto& turn_json : j.value("turns", nlohmann::json::array())) {
      LogTurn turn;
      turn.thought = turn_json.value("thought", std::string());
      turn.action.name = turn_json.at("action").at("name").get<std::string>();
      turn.action.parameters = turn_json.at("action").value("parameters", nlohmann::json::object());
      turn.observation = turn_json.value("observation", std::string());
      record.turns.push_back(std::move(turn));
    }
    record.final_answer = j.at("final_answer");
    record.golden_answer = j.at("golden_answer");
    validate(record);
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
}

std::string serialize_record(const TrajectoryLogRecord& record) {
  validate(record);
  nlohmann::json j;
  j["version"] = kTrajectoryLogVersion;
  j["question_id"] = record.question_id;
  j["category"] = record.category;
  j["answer_format"] = record.answer_format;
  if (record.draft.has_value()) {
    j["draft"] = {{"text", record.draft->text}, {"token_logprobs", record.draft->token_logprobs}};
  }
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& turn : record.turns) {
    turns.push_back({{"thought", turn.thought},
                     {"action", {{"name", turn.action.name}, {"parameters", turn.action.parameters}}},
                     {"observation", turn.observation}});
  }
  j["turns"] = turns;
  j["final_answer"] = record.final_answer;
  j["golden_answer"] = record.golden_answer;
  return j.dump();
}

LogReadResult read_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read trajectory log: " + path);
  LogReadResult result;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank line
    ++result.total_lines;
    try {
      result.records.push_back(parse_record(line));
    } catch (const ConfigError& e) {
      result.skipped.emplace_back(line_number, e.what());
    }
  }
  return result;
}

std::vector<TrajectoryLogRecord> records_from_rollout(const lab::RolloutGroup& group,
                                                      const lab::DraftWorldConfig& config,
                                                      const std::string& question_id) {
  std::vector<TrajectoryLogRecord> records;
  records.reserve(group.trajectories.size());
  for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
    const auto& traj = group.trajectories[i];
    TrajectoryLogRecord record;
    record.question_id = question_id + "#" + std::to_string(i);
    record.category = "text";
    record.answer_format = "python string";

    DraftRecord draft;
    std::ostringstream text;
    for (std::size_t k = 0; k < traj.draft_tokens.size(); ++k) {
      if (k > 0) text << ' ';
      text << "plan-" << traj.draft_tokens[k];
    }
    draft.text = text.str();
    draft.token_logprobs = traj.draft_logprobs;
    record.draft = std::move(draft);

    for (const auto& turn : traj.turns) {
      record.turns.push_back({"", turn.action, turn.observation});
    }
    record.final_answer = traj.answer;
    record.golden_answer = config.golden_answer(traj.answer_location);
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace draftlab::io
