#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsb/cli/config.hpp"

namespace hsb::cli {

enum ExitCode { exit_ok = 0, exit_check_failed = 1, exit_validation = 2, exit_solver = 3, exit_cusp = 4 };

struct RunOptions {
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int stride = 1;
  std::optional<int> grid;
  bool quiet = false;
};

const std::vector<std::string>& command_names();

// Runs one subcommand and writes its outputs; never throws.
int run_command(const std::string& command, const ScenarioConfig& config, const RunOptions& options);

}  // namespace hsb::cli
