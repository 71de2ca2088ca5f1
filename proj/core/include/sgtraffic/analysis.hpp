#pragma once

// Moments of Galerkin coefficient vectors and the stochastic fundamental
// diagram built from them.

#include <vector>

#include "sgtraffic/chaos.hpp"
#include "sgtraffic/macro.hpp"

namespace sgtraffic {

/// Mode 0.
double mean(const GalerkinVector& u);

/// sum_{k>=1} u_k^2.
double variance(const GalerkinVector& u);

/// f~ = P(rho) V_eq-hat; same computation as lwr_flux.
GalerkinVector fundamental_diagram(const GalerkinVector& rho, const TripleProductTensor& tensor,
                                   const ScalarLaw& v_eq = greenshields_law());

struct FDPoint {
  int run_id = 0;
  double rho_r = 0.0;
  int cell = 0;
  double x = 0.0;
  double time = 0.0;
  double mean_rho = 0.0;
  double var_rho = 0.0;
  double mean_flux = 0.0;
  double var_flux = 0.0;
};

/// One point per cell of a density snapshot.
std::vector<FDPoint> fd_points(const MacroField& field, const MacroGrid& grid,
                               const TripleProductTensor& tensor, const ScalarLaw& v_eq,
                               int run_id, double rho_r);

/// Statistics of the points whose mean density falls in [lo, hi).
///
/// `flux_spread` is max - min of the mean flux. Inside one bin that is
/// dominated by the slope of the curve, so `residual_spread` measures the
/// scatter around the deterministic curve rho V_eq(rho) instead.
struct FDBin {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double min_flux = 0.0;
  double max_flux = 0.0;
  double flux_spread = 0.0;
  double residual_spread = 0.0;
  double mean_var_rho = 0.0;
  double mean_var_flux = 0.0;
};

std::vector<FDBin> bin_fd_points(const std::vector<FDPoint>& points, double width,
                                 const ScalarLaw& v_eq = greenshields_law());

struct FDScanConfig {
  MacroGrid grid;
  MacroModelSpec spec;
  RiemannData riemann;
  std::vector<double> right_states;
  double bin_width = 0.02;
  int workers = 1;
};

struct FDScan {
  std::vector<FDPoint> points;
  std::vector<FDBin> bins;
  std::vector<MacroRun> runs;
};

/// Runs every rho_r to the final time and collects the final-snapshot points.
FDScan fd_scan(const FDScanConfig& config, const TripleProductTensor& tensor);

}  // namespace sgtraffic
