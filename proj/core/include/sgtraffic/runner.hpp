#pragma once

// Command orchestration shared by the CLI and the integration tests. Every
// command writes its results plus a manifest.json into the output directory.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgtraffic/config.hpp"

namespace sgtraffic {

enum class Command { basis_check, micro, kinetic, macro, fd_scan, mc_compare, micro2macro, meso2macro };

std::string to_string(Command command);
std::optional<Command> parse_command(std::string_view name);
const std::vector<Command>& all_commands();

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_numerical = 3 };

/// Maps an exception from parse or run to the process exit code.
int exit_code_for(const std::exception& error);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int workers = 1;
  std::optional<std::uint64_t> seed;  ///< overrides experiment.seed
  std::string config_text;            ///< raw file bytes, hashed into the manifest
  std::string config_path;
};

struct RunResult {
  std::vector<std::string> files;  ///< relative to out_dir, in write order
  std::string summary;             ///< one human-readable line
};

/// Throws ConfigError when the config does not fit the command.
RunResult run_command(Command command, const ExperimentConfig& config, const RunOptions& options);

}  // namespace sgtraffic
