#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace kfp::cli {

enum ExitCode : int { kExitSuccess = 0, kExitThreshold = 1, kExitUsage = 2 };

inline constexpr int kSchemaVersion = 1;

const std::vector<std::string>& command_names();
const Schema& schema_for(const std::string& command);

/// Runs one command. CSV goes to out_path (atomically) or to `out` when the path is empty;
/// human-readable messages go to `log`. Configuration problems throw ConfigError.
int run_command(const std::string& command, const Config& cfg, const std::string& out_path, std::ostream& out,
                std::ostream& log);

/// Full entry point: parses a config file and overrides, runs, and maps every failure to an exit code.
int run_cli(const std::string& command, const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_path, std::ostream& out, std::ostream& log);

/// Writes to path.tmp and renames over path.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace kfp::cli
