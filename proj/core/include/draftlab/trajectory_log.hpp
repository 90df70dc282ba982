#pragma once

/**
 * @file trajectory_log.hpp
 * @brief Line-delimited trajectory records: the lab's interchange format.
 *
 * One self-describing JSON object per line, version-tagged. Field names are
 * frozen in docs/formats.md. Action names come from the documented alphabet
 * {RetrieveFromVectorstore, ClassicRetrieve, RetrieveFromDatabase, ViewImage,
 * CalculateExpr, GenerateAnswer} or an extension namespace ("ext:" prefix).
 * A terminal record carries exactly one GenerateAnswer, as its last action.
 */

#include <optional>
#include <string>
#include <vector>

#include "draftlab/action_record.hpp"
#include "draftlab/answer_value.hpp"
#include "draftlab/draftworld.hpp"

namespace draftlab::io {

inline constexpr int kTrajectoryLogVersion = 1;

struct LogTurn {
  std::string thought;
  ActionRecord action;
  std::string observation;
};

struct DraftRecord {
  std::string text;
  std::vector<double> token_logprobs;  ///< each <= 0
};

struct TrajectoryLogRecord {
  std::string question_id;
  std::string category;            ///< text|table|image|formula|metadata|...
  std::string answer_format;       ///< free-text hint
  std::optional<DraftRecord> draft;
  std::vector<LogTurn> turns;
  AnswerValue final_answer;
  AnswerValue golden_answer;

  bool terminal() const;           ///< last action is GenerateAnswer
  int turn_count() const { return static_cast<int>(turns.size()); }
  std::vector<ActionRecord> actions() const;
};

/// Parses one JSONL line; ConfigError on malformed input or invariant
/// violations (unknown action name, misplaced or duplicated GenerateAnswer).
TrajectoryLogRecord parse_record(const std::string& line);

std::string serialize_record(const TrajectoryLogRecord& record);

struct LogReadResult {
  std::vector<TrajectoryLogRecord> records;
  std::vector<std::pair<int, std::string>> skipped;  ///< (1-based line, reason)
  int total_lines = 0;
};

/// Reads a log file; malformed lines are collected, never silently dropped.
/// Unreadable file raises ConfigError.
LogReadResult read_log(const std::string& path);

/// Rollout trajectories rendered as log records (one per trajectory), with
/// the group's golden answer attached — the bridge from reward groups to the
/// interchange format.
std::vector<TrajectoryLogRecord> records_from_rollout(const lab::RolloutGroup& group,
                                                      const lab::DraftWorldConfig& config,
                                                      const std::string& question_id);

}  // namespace draftlab::io
