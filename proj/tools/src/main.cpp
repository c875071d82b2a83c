#include <iostream>

#include "CLI11.hpp"

#include "hsb/cli/commands.hpp"
#include "hsb/error.hpp"

int main(int argc, char** argv) {
  using namespace hsb::cli;
  CLI::App app{"Hele-Shaw bubble contraction laboratory"};
  app.require_subcommand(1, 1);
  std::string config_path;
  RunOptions opt;
  std::uint64_t seed = 0;
  int grid = 0;
  std::string out = "out";

  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "seed for property sampling and multistart jitter");
    sub->add_option("--stride", opt.stride, "snapshot export stride")->check(CLI::PositiveNumber);
    sub->add_option("--grid", grid, "region grid resolution")->check(CLI::Range(16, 256));
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--grid")) opt.grid = grid;
  opt.out = out;

  ScenarioConfig config;
  try {
    config = load_config(config_path);
  } catch (const hsb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  }
  return run_command(command, config, opt);
}
