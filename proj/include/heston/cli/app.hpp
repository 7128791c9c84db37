#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "heston/cli/config.hpp"

namespace heston::cli {

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// A parsed command line with flags folded into a config map, so the flag
/// path and the config-file path share one spec builder.
struct ParsedCommand {
  std::string command;  // exact | price | varswap | bench
  ConfigMap config;
  std::string table;    // bench only
  std::string out_path;
  std::string reps_out_path;
  TableFormat format = TableFormat::markdown;
  bool help = false;
  std::string help_text;
};

/// args excludes the program name. Throws ConfigError on usage problems.
ParsedCommand parse_command(const std::vector<std::string>& args);

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heston::cli
