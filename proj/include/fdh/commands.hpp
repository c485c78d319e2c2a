#pragma once

// Subcommand dispatch shared by the command-line tool and the tests.

#include "fdh/config.hpp"
#include "fdh/report.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace fdh {

struct CommandResult {
  ResultRecord record;
  /// 0: report produced or verdict holds; 2: verdict fails.
  int exit_code = 0;
  std::vector<Table> tables;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand. Errors: InvalidArgument for an unknown command, plus
/// whatever the underlying module raises.
CommandResult run_command(const ExperimentConfig& cfg, std::string_view command);

/// The config echo stored in records: execution-only settings (worker count,
/// driver) are dropped since they do not change any result.
Json inputs_echo(const Json& source);

/// Column lists of the per-path tables.
const std::vector<std::string>& couple_columns();
const std::vector<std::string>& trace_columns();
const std::vector<std::string>& simulate_columns();

}  // namespace fdh
