#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace draftlab::cli {

/// Exit codes shared by every subcommand: 0 success, 1 property violation,
/// 2 usage or configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string config_path;              ///< empty: built-in defaults
  std::optional<std::uint64_t> seed;    ///< overrides the config seed
  std::string out_dir;                  ///< empty: no files written
  bool stub_judge = false;
};

int cmd_verify(const CommonArgs& args);
int cmd_train(const CommonArgs& args);
int cmd_eval(const CommonArgs& args, const std::string& log_path);
int cmd_probe(const CommonArgs& args);
int cmd_report(const std::string& report_path);

}  // namespace draftlab::cli
