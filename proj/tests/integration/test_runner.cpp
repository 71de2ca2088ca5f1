// End-to-end runs of every command through the runner: expected files,
// manifest content, and byte-identical outputs across reruns and worker counts.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sgtraffic/runner.hpp"

using namespace sgtraffic;
namespace fs = std::filesystem;

namespace {

const std::string kData = SGTRAFFIC_TEST_DATA;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Case {
  Command command;
  std::string text;
};

std::map<std::string, std::string> run_into(const Case& c, const fs::path& dir, int workers,
                                            std::optional<std::uint64_t> seed = {}) {
  fs::remove_all(dir);
  RunOptions o;
  o.out_dir = dir;
  o.workers = workers;
  o.seed = seed;
  o.config_text = c.text;
  o.config_path = "inline.cfg";
  const RunResult r = run_command(c.command, parse_config(c.text), o);
  std::map<std::string, std::string> files;
  for (const std::string& f : r.files) files[f] = slurp(dir / f);
  files["manifest.json"] = slurp(dir / "manifest.json");
  return files;
}

// Small versions of the shipped configs so the suite stays quick.
std::vector<Case> cases() {
  return {
      {Command::basis_check, slurp(kData + "/baseline.cfg")},
      {Command::micro, slurp(kData + "/micro.cfg")},
      {Command::kinetic, "basis.K = 3\nmodel.type = kinetic\nmodel.relaxation = 0.01\ngrid.cells = 40\n"
                         "grid.velocity_cells = 20\ngrid.final_time = 0.2\noutput.full_field = true\n"},
      {Command::macro, slurp(kData + "/baseline.cfg")},
      {Command::fd_scan, "basis.K = 7\ngrid.cells = 60\nexperiment.type = fdscan\n"
                         "experiment.right_states = 0, 0.3, 0.6\noutput.svg = true\n"},
      {Command::mc_compare, "basis.K = 7\ngrid.cells = 40\ngrid.final_time = 0.5\nexperiment.type = mccompare\n"
                            "experiment.samples = 64\nexperiment.orders = 1, 3\n"},
      {Command::micro2macro, "basis.K = 3\ngrid.cells = 50\ngrid.final_time = 0.3\nexperiment.type = micro2macro\n"
                             "experiment.resolutions = 20, 40\nexperiment.reference_cells = 100\n"},
      {Command::meso2macro, "basis.K = 3\nmodel.type = kinetic\ngrid.cells = 40\ngrid.velocity_cells = 20\n"
                            "grid.final_time = 0.2\nexperiment.type = meso2macro\nexperiment.relaxations = 0.1, 0.01\n"},
  };
}

}  // namespace

TEST_CASE("every command writes its outputs and a manifest") {
  const fs::path root = fs::temp_directory_path() / "sgtraffic_runner";
  for (const Case& c : cases()) {
    CAPTURE(to_string(c.command));
    const auto files = run_into(c, root / to_string(c.command), 1);
    CHECK(files.size() >= 2);
    const auto manifest = nlohmann::json::parse(files.at("manifest.json"));
    CHECK(manifest.at("command") == to_string(c.command));
    CHECK(manifest.contains("config_canonical_fnv1a"));
    CHECK(manifest.contains("version"));
    for (const auto& [name, bytes] : files) {
      CHECK_FALSE(bytes.empty());
      if (name != "manifest.json") CHECK(manifest.at("outputs").dump().find(name) != std::string::npos);
    }
  }
  fs::remove_all(root);
}

TEST_CASE("outputs are byte-identical across reruns and worker counts") {
  const fs::path root = fs::temp_directory_path() / "sgtraffic_repro";
  for (const Case& c : cases()) {
    CAPTURE(to_string(c.command));
    const auto a = run_into(c, root / "a", 1);
    const auto b = run_into(c, root / "b", 3);
    const auto again = run_into(c, root / "c", 1);
    CHECK(a == b);
    CHECK(a == again);
  }
  fs::remove_all(root);
}

TEST_CASE("seed override changes the Monte Carlo output and is recorded") {
  const fs::path root = fs::temp_directory_path() / "sgtraffic_seed";
  const Case mc = cases()[5];
  const auto base = run_into(mc, root / "a", 1);
  const auto seeded = run_into(mc, root / "b", 1, 777);
  CHECK(base.at("mc_moments.csv") != seeded.at("mc_moments.csv"));
  CHECK(nlohmann::json::parse(seeded.at("manifest.json")).at("seed") == 777);
  fs::remove_all(root);
}

TEST_CASE("config that does not fit the command is a config error") {
  const fs::path root = fs::temp_directory_path() / "sgtraffic_mismatch";
  RunOptions o;
  o.out_dir = root;
  const ExperimentConfig lwr = parse_config("model.type = lwr\n");
  CHECK_THROWS_AS(run_command(Command::micro, lwr, o), ConfigError);
  CHECK_THROWS_AS(run_command(Command::kinetic, lwr, o), ConfigError);
  const ExperimentConfig fd = parse_config("experiment.type = fdscan\n");
  CHECK_THROWS_AS(run_command(Command::micro2macro, fd, o), ConfigError);
  fs::remove_all(root);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ConfigError("x")) == exit_config);
  CHECK(exit_code_for(InvalidArgument("x")) == exit_config);
  CHECK(exit_code_for(NumericalError("x")) == exit_numerical);
  CHECK(exit_code_for(IoError("x")) == exit_usage);
  for (Command c : all_commands()) CHECK(parse_command(to_string(c)) == c);
  CHECK_FALSE(parse_command("nope").has_value());
}
