// sgtraffic: command-line front end. Exit codes: 0 ok, 1 usage or I/O,
// 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sgtraffic/runner.hpp"
#include "sgtraffic/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sgtraffic::IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Galerkin traffic flow simulator"};
  app.set_version_flag("--version", sgtraffic::version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  std::uint64_t seed = 0;

  struct Sub {
    sgtraffic::Command command;
    CLI::App* app;
  };
  std::vector<Sub> subs;
  const auto describe = [](sgtraffic::Command c) -> std::string {
    switch (c) {
      case sgtraffic::Command::basis_check: return "Build the basis and tensor, check orthonormality and hyperbolicity";
      case sgtraffic::Command::micro: return "Run the stochastic follow-the-leader model";
      case sgtraffic::Command::kinetic: return "Run the stochastic BGK kinetic model";
      case sgtraffic::Command::macro: return "Run the stochastic LWR or ARZ finite-volume solver";
      case sgtraffic::Command::fd_scan: return "Sweep the right Riemann state and collect the fundamental diagram";
      case sgtraffic::Command::mc_compare: return "Compare stochastic Galerkin moments with Monte Carlo";
      case sgtraffic::Command::micro2macro: return "Micro to macro convergence study";
      case sgtraffic::Command::meso2macro: return "Kinetic to macro convergence study";
    }
    return {};
  };
  for (sgtraffic::Command c : sgtraffic::all_commands()) {
    CLI::App* sub = app.add_subcommand(sgtraffic::to_string(c), describe(c));
    sub->add_option("--config", config_path, "Configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Random seed (overrides experiment.seed)");
    subs.push_back({c, sub});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sgtraffic::exit_usage;
  }

  for (const Sub& s : subs) {
    if (!s.app->parsed()) continue;
    try {
      sgtraffic::RunOptions options;
      options.out_dir = out_dir;
      options.workers = workers;
      if (s.app->count("--seed") > 0) options.seed = seed;
      options.config_path = config_path;
      options.config_text = read_file(config_path);
      const sgtraffic::ExperimentConfig config = sgtraffic::parse_config(options.config_text);
      const sgtraffic::RunResult result = sgtraffic::run_command(s.command, config, options);
      std::cout << result.summary << '\n';
      for (const std::string& f : result.files) std::cout << "  " << (options.out_dir / f).string() << '\n';
      return sgtraffic::exit_ok;
    } catch (const std::exception& e) {
      const int code = sgtraffic::exit_code_for(e);
      const char* kind = code == sgtraffic::exit_config      ? "config error"
                         : code == sgtraffic::exit_numerical ? "numerical failure"
                                                             : "error";
      std::cerr << "sgtraffic " << sgtraffic::to_string(s.command) << ": " << kind << ":\n" << e.what() << '\n';
      return code;
    }
  }
  return sgtraffic::exit_usage;
}
