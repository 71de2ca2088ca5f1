#pragma once

// Cross-scale convergence experiments: follow-the-leader to SG-LWR as the
// vehicle length shrinks, and BGK to SG-ARZ as the relaxation time shrinks.

#include <vector>

#include "sgtraffic/chaos.hpp"
#include "sgtraffic/kinetic.hpp"
#include "sgtraffic/macro.hpp"
#include "sgtraffic/micro.hpp"

namespace sgtraffic {

struct Micro2MacroConfig {
  MacroGrid grid;               ///< domain, final time and boundary of the comparison
  int reference_cells = 800;    ///< SG-LWR reference resolution
  MacroModelSpec spec;          ///< LWR; V_eq doubles as the micro speed law
  RiemannData riemann;
  std::vector<int> resolutions{100, 200, 400};  ///< N, with L = 1/N
  double buffer = 1.5;          ///< vehicles cover [a - buffer, b + buffer]
  double dt_factor = 0.25;      ///< RK4 step dt = dt_factor * L
  int workers = 1;
};

struct Micro2MacroRow {
  int resolution = 0;
  double length = 0.0;
  int vehicles = 0;
  double dt = 0.0;
  double l1_mean = 0.0;
  double l1_variance = 0.0;
};

struct Micro2MacroResult {
  std::vector<Micro2MacroRow> rows;
  MacroRun reference;
  std::vector<MicroState> final_states;
};

/// Micro platoon placed so each gap carries density mass L of the Riemann datum.
MicroState riemann_platoon(const Micro2MacroConfig& config, int resolution, const Basis& basis,
                           MicroParams* params);

Micro2MacroResult run_micro2macro(const Micro2MacroConfig& config, const TripleProductTensor& tensor);

struct Meso2MacroConfig {
  KineticGrid kinetic;          ///< relaxation is overwritten per sweep entry
  RiemannData riemann;
  std::vector<double> relaxations{1e-1, 1e-2, 1e-3};
  int workers = 1;
};

struct Meso2MacroRow {
  double relaxation = 0.0;
  double l1_rho = 0.0;
  double l1_q = 0.0;
  double l1_total = 0.0;
  double initial_mismatch = 0.0;  ///< max |moments - macro initial coefficients|
  double um1_max = 0.0;
  double um2_max = 0.0;
  long builds = 0;
  int kinetic_steps = 0;
  int macro_steps = 0;
};

struct Meso2MacroResult {
  std::vector<Meso2MacroRow> rows;
  bool compared_to_lwr = false;  ///< h = 0 reduces the limit to SG-LWR
};

/// Macro grid matching the kinetic space discretisation.
MacroGrid macro_grid_of(const KineticGrid& grid);

Meso2MacroResult run_meso2macro(const Meso2MacroConfig& config, const TripleProductTensor& tensor);

}  // namespace sgtraffic
