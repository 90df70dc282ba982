#include <CLI11.hpp>

#include "commands.hpp"
#include "draftlab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"draftlab: group-relative draft-and-follow policy optimization lab"};
  app.set_version_flag("--version", draftlab::kVersion);
  app.require_subcommand(1);

  draftlab::cli::CommonArgs args;
  std::string log_path;
  std::string report_path;

  auto add_common = [&](CLI::App* cmd, bool with_judge = false) {
    cmd->add_option("--config", args.config_path, "JSON configuration file");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--out", args.out_dir, "directory for report and curve files");
    if (with_judge) {
      cmd->add_flag("--stub-judge", args.stub_judge,
                    "score judge-backed functions with the deterministic stub");
    }
  };

  auto* verify = app.add_subcommand("verify", "run the Monte-Carlo property battery");
  add_common(verify);

  auto* train = app.add_subcommand("train", "imitation then policy-gradient arms over seeds");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "score a trajectory log through the reward router");
  add_common(eval, true);
  eval->add_option("log", log_path, "line-delimited trajectory records")->required();

  auto* probe = app.add_subcommand("probe", "knowing-doing bandit probe");
  add_common(probe);

  auto* report = app.add_subcommand("report", "render a stored run report");
  report->add_option("file", report_path, "report JSON document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : draftlab::cli::kExitUsage;
  }

  if (verify->parsed()) return draftlab::cli::cmd_verify(args);
  if (train->parsed()) return draftlab::cli::cmd_train(args);
  if (eval->parsed()) return draftlab::cli::cmd_eval(args, log_path);
  if (probe->parsed()) return draftlab::cli::cmd_probe(args);
  if (report->parsed()) return draftlab::cli::cmd_report(report_path);
  return draftlab::cli::kExitUsage;
}
