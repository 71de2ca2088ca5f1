#include "sgtraffic/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include <Eigen/Core>
#include <fmt/format.h>
#include <json.hpp>

#include "sgtraffic/analysis.hpp"
#include "sgtraffic/experiments.hpp"
#include "sgtraffic/io.hpp"
#include "sgtraffic/mc_oracle.hpp"
#include "sgtraffic/version.hpp"

namespace sgtraffic {
namespace {

using json = nlohmann::ordered_json;

// JSON has no infinity; spell non-finite values as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    files_.push_back(name);
    hashes_[name] = hex64(fnv1a(content));
  }
  void write(const std::string& name, const json& content) { write(name, content.dump(2) + "\n"); }

  const std::vector<std::string>& files() const { return files_; }
  json hashes() const {
    json out = json::object();
    for (const std::string& f : files_) out[f] = hashes_.at(f);
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  std::map<std::string, std::string> hashes_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigErrors({{0, message}});
}

void require_experiment(const ExperimentConfig& c, Command command, ExperimentType allowed) {
  require(c.experiment.type == ExperimentType::none || c.experiment.type == allowed,
          fmt::format("experiment.type = {} does not fit the '{}' command", to_string(c.experiment.type),
                      to_string(command)));
}

std::shared_ptr<const Basis> make_basis(const BasisSpec& spec) {
  return std::make_shared<const Basis>(build_basis(spec));
}

json hyperbolicity_json(const HyperbolicityReport& r) {
  return json{{"a1_max_commutator", r.a1_max_commutator},
              {"a2_max_commutator", r.a2_max_commutator},
              {"a3_diagonalization_residual", r.a3_diagonalization_residual},
              {"tolerance", r.tolerance},
              {"passed", r.passed},
              {"a1_detail", r.a1_detail},
              {"a2_detail", r.a2_detail},
              {"a3_detail", r.a3_detail}};
}

json basis_json(const Basis& basis) {
  return json{{"family", to_string(basis.spec().family)},
              {"K", basis.order()},
              {"modes", basis.size()},
              {"quadrature_nodes", basis.nodes().size()}};
}

std::uint64_t seed_of(const ExperimentConfig& c, const RunOptions& o) {
  return o.seed.value_or(c.experiment.seed);
}

// ---------------------------------------------------------------------------

RunResult basis_check(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  require_experiment(c, Command::basis_check, ExperimentType::none);
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  HyperbolicityOptions h;
  h.seed = seed_of(c, o);
  const HyperbolicityReport report = check_hyperbolicity(tensor, h);
  const double residual = orthonormality_residual(*basis);

  out.write("tensor.csv", tensor_csv(tensor));
  json j{{"basis", basis_json(*basis)},
         {"orthonormality_residual", residual},
         {"m0_identity_residual", (tensor[0] - Matrix::Identity(tensor.size(), tensor.size())).cwiseAbs().maxCoeff()},
         {"hyperbolicity", hyperbolicity_json(report)},
         {"samples", h.samples},
         {"seed", h.seed}};
  out.write("basis_check.json", j);
  return {{}, fmt::format("basis {} K={}: orthonormality {:.3e}, hyperbolicity {}", to_string(c.basis.family),
                          c.basis.order, residual, report.passed ? "passed" : "failed")};
}

RunResult micro(const ExperimentConfig& c, const RunOptions&, Outputs& out) {
  require_experiment(c, Command::micro, ExperimentType::none);
  require(c.model.type == ModelType::micro, "the 'micro' command needs model.type = micro");
  require(c.initial.type == InitialType::platoon, "the 'micro' command needs initial.type = platoon");
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  const MicroParams params = micro_params(c);
  MicroState initial =
      make_platoon(params.vehicles, c.initial.leader_position, c.initial.headway, c.initial.noise, *basis);
  const MicroRunOptions options = micro_options(c);
  if (options.order == MicroOrder::second) initial.velocities = micro_rhs_first_order(initial, params, *basis);
  const std::vector<MicroState> states = integrate_micro(initial, params, tensor, options);

  out.write("trajectory.csv", trajectory_csv(states, params, tensor));
  out.write("local_density.csv", local_density_csv(states, params, *basis));
  std::vector<double> times;
  for (const MicroState& s : states) times.push_back(s.time);
  json j{{"basis", basis_json(*basis)},
         {"vehicles", params.vehicles},
         {"length", params.length},
         {"order", static_cast<int>(options.order)},
         {"dt", options.dt},
         {"steps", static_cast<long>(std::llround(options.final_time / options.dt))},
         {"snapshot_times", numbers(times)}};
  out.write("run.json", j);
  return {{}, fmt::format("micro: {} vehicles, {} snapshots", params.vehicles, states.size())};
}

RunResult kinetic(const ExperimentConfig& c, const RunOptions&, Outputs& out) {
  require_experiment(c, Command::kinetic, ExperimentType::none);
  require(c.model.type == ModelType::kinetic, "the 'kinetic' command needs model.type = kinetic");
  require(c.initial.type == InitialType::riemann, "the 'kinetic' command needs initial.type = riemann");
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  const KineticGrid grid = kinetic_grid(c);
  const Matrix rho0 = init_riemann(macro_grid_of(grid), MacroModelSpec{}, *basis, c.initial.riemann).rho;
  const KineticRun run = run_kinetic(equilibrium_field(rho0, grid, *basis), grid, tensor, c.output.times);

  out.write("moments.csv", kinetic_moments_csv(run.snapshots, grid));
  if (c.output.full_field) out.write("field.csv", kinetic_field_csv(run.snapshots, grid));
  json j{{"basis", basis_json(*basis)},
         {"relaxation", grid.relaxation},
         {"velocity_cells", grid.velocity_cells},
         {"w_max", grid.w_max},
         {"equilibrium_width", grid.equilibrium_width()},
         {"steps", run.steps},
         {"dt_history", numbers(run.dt_history)},
         {"conservation_drift", run.conservation_drift},
         {"equilibrium_audit",
          {{"um1_max", run.audit.um1_max}, {"um2_max", run.audit.um2_max}, {"builds", run.audit.builds}}}};
  out.write("run.json", j);
  return {{}, fmt::format("kinetic: {} steps, UM1 {:.2e}, UM2 {:.2e}", run.steps, run.audit.um1_max,
                          run.audit.um2_max)};
}

RunResult macro(const ExperimentConfig& c, const RunOptions&, Outputs& out) {
  require_experiment(c, Command::macro, ExperimentType::none);
  require(c.model.type == ModelType::lwr || c.model.type == ModelType::arz,
          "the 'macro' command needs model.type = lwr or arz");
  require(c.initial.type == InitialType::riemann, "the 'macro' command needs initial.type = riemann");
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  const MacroRunConfig config = macro_run_config(c);
  const MacroRun run = run_macro(init_riemann(config.grid, config.spec, *basis, c.initial.riemann), config, tensor);

  out.write("snapshots.csv", macro_csv(run.snapshots, config.grid));
  json j{{"basis", basis_json(*basis)},
         {"model", to_string(config.spec.model)},
         {"relaxation", number(config.spec.relaxation_time)},
         {"cells", config.grid.cells},
         {"cfl", config.grid.cfl},
         {"boundary", to_string(config.grid.boundary)},
         {"steps", run.steps},
         {"dt_history", numbers(run.dt_history)},
         {"lambda_history", numbers(run.lambda_history)},
         {"conservation_drift", run.conservation_drift}};
  out.write("run.json", j);
  return {{}, fmt::format("macro {}: {} steps", to_string(config.spec.model), run.steps)};
}

RunResult fd_scan_command(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  require_experiment(c, Command::fd_scan, ExperimentType::fdscan);
  require(c.model.type == ModelType::lwr, "the 'fd-scan' command needs model.type = lwr");
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  FDScanConfig config = fd_scan_config(c);
  config.workers = o.workers;
  const FDScan scan = fd_scan(config, tensor);

  out.write("fd_points.csv", fd_points_csv(scan.points));
  out.write("fd_bins.csv", fd_bins_csv(scan.bins));
  if (c.output.svg) out.write("fd_scatter.svg", fd_svg(scan.points));
  json runs = json::array();
  for (std::size_t r = 0; r < scan.runs.size(); ++r) {
    runs.push_back({{"run_id", r},
                    {"rho_r", config.right_states[r]},
                    {"steps", scan.runs[r].steps},
                    {"conservation_drift", scan.runs[r].conservation_drift}});
  }
  json j{{"basis", basis_json(*basis)},
         {"bin_width", config.bin_width},
         {"snapshots", "final time only"},
         {"final_time", config.grid.final_time},
         {"right_states", numbers(config.right_states)},
         {"runs", runs}};
  out.write("fd_scan.json", j);
  return {{}, fmt::format("fd-scan: {} runs, {} points", scan.runs.size(), scan.points.size())};
}

json compare_json(const CompareReport& report) {
  json snaps = json::array();
  for (const CompareSnapshot& s : report.snapshots) {
    snaps.push_back({{"t", s.time},
                     {"l1_mean", s.l1_mean},
                     {"linf_mean", s.linf_mean},
                     {"l1_variance", s.l1_variance},
                     {"l1_standard_error", s.l1_standard_error},
                     {"threshold", s.threshold},
                     {"passed", s.passed}});
  }
  return json{{"atol", report.atol}, {"passed", report.passed}, {"snapshots", snaps}};
}

RunResult mc_compare(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  require_experiment(c, Command::mc_compare, ExperimentType::mccompare);
  require(c.model.type == ModelType::lwr || c.model.type == ModelType::arz,
          "the 'mc-compare' command needs model.type = lwr or arz");
  const MacroRunConfig config = macro_run_config(c);
  const std::uint64_t seed = seed_of(c, o);
  const MCRun mc = mc_solve(config, c.initial.riemann, c.experiment.samples, seed, o.workers);

  const auto sg_report = [&](int order) {
    BasisSpec spec = basis_spec(c);
    spec.order = order;
    const auto basis = make_basis(spec);
    const TripleProductTensor tensor = compute_triple_tensor(basis);
    const MacroRun run =
        run_macro(init_riemann(config.grid, config.spec, *basis, c.initial.riemann), config, tensor);
    return compare(run.snapshots, mc, c.experiment.atol);
  };

  const CompareReport main = sg_report(c.basis.order);
  json sweep = json::array();
  std::vector<CompareReport> reports;
  for (int k : c.experiment.orders) {
    reports.push_back(sg_report(k));
    sweep.push_back({{"K", k}, {"report", compare_json(reports.back())}});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    for (std::size_t s = 0; s < reports[i].snapshots.size(); ++s) {
      monotone = monotone && reports[i].snapshots[s].l1_mean <= reports[i - 1].snapshots[s].l1_mean;
    }
  }

  out.write("mc_moments.csv", mc_moments_csv(mc));
  json j{{"model", mc.model},
         {"samples", mc.samples},
         {"seed", mc.seed},
         {"basis", to_string(c.basis.family)},
         {"K", c.basis.order},
         {"comparison", compare_json(main)},
         {"order_sweep", sweep},
         {"order_sweep_nonincreasing", monotone}};
  out.write("mc_report.json", j);
  return {{}, fmt::format("mc-compare: M={} seed={} {}; K sweep {}", mc.samples, mc.seed,
                          main.passed ? "within tolerance" : "OUT OF TOLERANCE",
                          monotone ? "nonincreasing" : "not monotone")};
}

RunResult micro2macro(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  require_experiment(c, Command::micro2macro, ExperimentType::micro2macro);
  require(c.model.type == ModelType::lwr, "the 'micro2macro' command needs model.type = lwr");
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  Micro2MacroConfig config = micro2macro_config(c);
  config.workers = o.workers;
  const Micro2MacroResult result = run_micro2macro(config, tensor);

  std::string csv = "N,L,vehicles,dt,l1_mean,l1_variance\n";
  json rows = json::array();
  for (const Micro2MacroRow& r : result.rows) {
    csv += fmt::format("{},{},{},{},{},{}\n", r.resolution, format_number(r.length), r.vehicles,
                       format_number(r.dt), format_number(r.l1_mean), format_number(r.l1_variance));
    rows.push_back({{"N", r.resolution},
                    {"L", r.length},
                    {"vehicles", r.vehicles},
                    {"dt", r.dt},
                    {"l1_mean", r.l1_mean},
                    {"l1_variance", r.l1_variance}});
  }
  out.write("convergence.csv", csv);
  json j{{"basis", basis_json(*basis)},
         {"reference_cells", config.reference_cells},
         {"reference_steps", result.reference.steps},
         {"buffer", config.buffer},
         {"dt_factor", config.dt_factor},
         {"rows", rows}};
  out.write("micro2macro.json", j);
  return {{}, fmt::format("micro2macro: {} resolutions", result.rows.size())};
}

RunResult meso2macro(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  require_experiment(c, Command::meso2macro, ExperimentType::meso2macro);
  require(c.model.type == ModelType::kinetic, "the 'meso2macro' command needs model.type = kinetic");
  const auto basis = make_basis(basis_spec(c));
  const TripleProductTensor tensor = compute_triple_tensor(basis);
  Meso2MacroConfig config = meso2macro_config(c);
  config.workers = o.workers;
  const Meso2MacroResult result = run_meso2macro(config, tensor);

  std::string csv = "epsilon,l1_rho,l1_q,l1_total,initial_mismatch,um1_max,um2_max,builds\n";
  json rows = json::array();
  for (const Meso2MacroRow& r : result.rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", format_number(r.relaxation), format_number(r.l1_rho),
                       format_number(r.l1_q), format_number(r.l1_total), format_number(r.initial_mismatch),
                       format_number(r.um1_max), format_number(r.um2_max), r.builds);
    rows.push_back({{"epsilon", r.relaxation},
                    {"l1_rho", r.l1_rho},
                    {"l1_q", r.l1_q},
                    {"l1_total", r.l1_total},
                    {"initial_mismatch", r.initial_mismatch},
                    {"um1_max", r.um1_max},
                    {"um2_max", r.um2_max},
                    {"builds", r.builds},
                    {"kinetic_steps", r.kinetic_steps},
                    {"macro_steps", r.macro_steps}});
  }
  out.write("convergence.csv", csv);
  json j{{"basis", basis_json(*basis)},
         {"limit_model", result.compared_to_lwr ? "lwr" : "arz"},
         {"velocity_cells", config.kinetic.velocity_cells},
         {"dw", config.kinetic.dw()},
         {"rows", rows}};
  out.write("meso2macro.json", j);
  return {{}, fmt::format("meso2macro: {} relaxation times against SG-{}", result.rows.size(),
                          result.compared_to_lwr ? "LWR" : "ARZ")};
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::basis_check: return "basis-check";
    case Command::micro: return "micro";
    case Command::kinetic: return "kinetic";
    case Command::macro: return "macro";
    case Command::fd_scan: return "fd-scan";
    case Command::mc_compare: return "mc-compare";
    case Command::micro2macro: return "micro2macro";
    case Command::meso2macro: return "meso2macro";
  }
  return "?";
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands{Command::basis_check, Command::micro,      Command::kinetic,
                                             Command::macro,       Command::fd_scan,    Command::mc_compare,
                                             Command::micro2macro, Command::meso2macro};
  return commands;
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : all_commands()) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) != nullptr) return exit_config;
  if (dynamic_cast<const InvalidArgument*>(&error) != nullptr) return exit_config;
  if (dynamic_cast<const NumericalError*>(&error) != nullptr) return exit_numerical;
  return exit_usage;
}

RunResult run_command(Command command, const ExperimentConfig& config, const RunOptions& options) {
  if (options.workers < 1) throw ConfigErrors({{0, "--workers must be at least 1"}});
  Outputs out(options.out_dir);
  RunResult result;
  switch (command) {
    case Command::basis_check: result = basis_check(config, options, out); break;
    case Command::micro: result = micro(config, options, out); break;
    case Command::kinetic: result = kinetic(config, options, out); break;
    case Command::macro: result = macro(config, options, out); break;
    case Command::fd_scan: result = fd_scan_command(config, options, out); break;
    case Command::mc_compare: result = mc_compare(config, options, out); break;
    case Command::micro2macro: result = micro2macro(config, options, out); break;
    case Command::meso2macro: result = meso2macro(config, options, out); break;
  }

  // no timestamps or worker counts: identical inputs give identical manifests
  const std::string canonical = canonical_text(config);
  json manifest{{"tool", "sgtraffic"},
                {"version", version()},
                {"command", to_string(command)},
                {"config_path", options.config_path},
                {"config_file_fnv1a", hex64(fnv1a(options.config_text))},
                {"config_canonical_fnv1a", hex64(fnv1a(canonical))},
                {"config_canonical", canonical},
                {"seed", seed_of(config, options)},
                {"libraries",
                 {{"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                  {"fmt", FMT_VERSION},
                  {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)}}},
                {"compiler", __VERSION__},
                {"outputs", out.hashes()}};
  out.write("manifest.json", manifest);
  result.files = out.files();
  return result;
}

}  // namespace sgtraffic
