#pragma once

// Experiment configuration: line-oriented `section.key = value` text.
//
//   # comment
//   basis.family = haar
//   basis.K = 15
//   grid.cells = 200
//   output.times = 0.25, 0.5, 0.75
//
// Every problem in a file is collected before failing; each diagnostic
// carries the line it refers to.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sgtraffic/analysis.hpp"
#include "sgtraffic/chaos.hpp"
#include "sgtraffic/error.hpp"
#include "sgtraffic/experiments.hpp"
#include "sgtraffic/kinetic.hpp"
#include "sgtraffic/macro.hpp"
#include "sgtraffic/micro.hpp"

namespace sgtraffic {

struct ConfigDiagnostic {
  int line = 0;  ///< 0 when the problem is not tied to one line
  std::string message;
};

/// Thrown by parse_config; what() lists every diagnostic, one per line.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<ConfigDiagnostic> diagnostics);
  const std::vector<ConfigDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<ConfigDiagnostic> diagnostics_;
};

enum class ModelType { micro, kinetic, lwr, arz };
enum class ExperimentType { none, micro2macro, meso2macro, fdscan, mccompare };
enum class InitialType { riemann, platoon };

std::string to_string(ModelType type);
std::string to_string(ExperimentType type);

struct BasisSection {
  BasisFamily family = BasisFamily::haar;
  int order = 15;  ///< K
  int quadrature = 0;
};

struct ModelSection {
  ModelType type = ModelType::lwr;
  double v_max = 1.0;            ///< V_eq(rho) = v_max (1 - rho)
  double hesitation_scale = 1.0; ///< h(rho) = scale * rho
  double relaxation = std::numeric_limits<double>::infinity();
  MicroOrder order = MicroOrder::first;
  int vehicles = 10;
  double length = 0.1;
  double leader_speed = 1.0;
  double leader_accel = 0.0;
  double C = 1.0;
  double A = 1.0;
  double reaction_time = 1.0;
  double perception_noise = 0.0;
};

struct GridSection {
  double a = 0.0;
  double b = 2.0;
  int cells = 200;
  double final_time = 1.0;
  double cfl = 0.45;
  Boundary boundary = Boundary::outflow;
  int velocity_cells = 40;
  double w_max = 2.0;
  double box_width = 0.0;
  double dt = 1e-3;  ///< micro time step
};

struct InitialSection {
  InitialType type = InitialType::riemann;
  RiemannData riemann;
  double leader_position = 0.0;
  double headway = 0.5;
  double noise = 0.0;
};

struct OutputSection {
  std::vector<double> times;
  double snapshot_interval = 0.0;  ///< micro
  bool full_field = false;         ///< kinetic: write g as well as the moments
  bool svg = false;                ///< fd-scan scatter plot
};

struct ExperimentSection {
  ExperimentType type = ExperimentType::none;
  std::vector<int> resolutions{100, 200, 400};
  int reference_cells = 800;
  double buffer = 1.5;
  double dt_factor = 0.25;
  std::vector<double> relaxations{1e-1, 1e-2, 1e-3};
  std::vector<double> right_states;  ///< empty: 21 equispaced values in [0,1]
  double bin_width = 0.02;
  int samples = 1000;
  std::uint64_t seed = 20220901;
  double atol = 5e-3;
  std::vector<int> orders{3, 7, 15};  ///< K sweep of the MC comparison
};

struct ExperimentConfig {
  BasisSection basis;
  ModelSection model;
  GridSection grid;
  InitialSection initial;
  OutputSection output;
  ExperimentSection experiment;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical `section.key = value` listing of every field, defaults included.
std::string canonical_text(const ExperimentConfig& config);

// Builders for the solver-level structs.
BasisSpec basis_spec(const ExperimentConfig& config);
ScalarLaw equilibrium_law(const ExperimentConfig& config);
ScalarLaw hesitation_law(const ExperimentConfig& config);
MacroGrid macro_grid(const ExperimentConfig& config);
MacroModelSpec macro_spec(const ExperimentConfig& config);
MacroRunConfig macro_run_config(const ExperimentConfig& config);
KineticGrid kinetic_grid(const ExperimentConfig& config);
MicroParams micro_params(const ExperimentConfig& config);
MicroRunOptions micro_options(const ExperimentConfig& config);
FDScanConfig fd_scan_config(const ExperimentConfig& config);
Micro2MacroConfig micro2macro_config(const ExperimentConfig& config);
Meso2MacroConfig meso2macro_config(const ExperimentConfig& config);

}  // namespace sgtraffic
