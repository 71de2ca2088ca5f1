#pragma once

// Stochastic Galerkin BGK model for the mass distribution g(t, x, w) over
// position and desired speed w = v + h(rho).

#include <limits>
#include <vector>

#include "sgtraffic/chaos.hpp"
#include "sgtraffic/laws.hpp"
#include "sgtraffic/macro.hpp"

namespace sgtraffic {

struct KineticGrid {
  double a = 0.0;
  double b = 2.0;
  int cells = 100;
  int velocity_cells = 40;
  double w_max = 2.0;      ///< W = [0, w_max]
  double relaxation = 0.1; ///< epsilon
  double box_width = 0.0;  ///< width of the equilibrium box; 0 means 0.2 * w_max
  double cfl = 0.45;
  double final_time = 1.0;
  Boundary boundary = Boundary::outflow;
  ScalarLaw v_eq = greenshields_law();
  ScalarLaw hesitation = linear_hesitation();

  double dx() const { return (b - a) / cells; }
  double dw() const { return w_max / velocity_cells; }
  double center(int j) const { return a + (j + 0.5) * dx(); }
  double speed(int m) const { return (m + 0.5) * dw(); }
  double equilibrium_width() const { return box_width > 0.0 ? box_width : 0.2 * w_max; }
};

/// Throws InvalidArgument on nonpositive widths/epsilon or a hesitation
/// function that is negative at 0 or decreasing on [0,1].
void validate(const KineticGrid& grid);

/// Coefficients g-hat; row (cell * velocity_cells + m), one column per mode.
struct KineticField {
  Matrix g;
  int cells = 0;
  int velocity_cells = 0;
  double time = 0.0;

  Eigen::Index row(int cell, int m) const { return static_cast<Eigen::Index>(cell) * velocity_cells + m; }
};

struct KineticMoments {
  Matrix rho;  ///< cells x (K+1)
  Matrix q;    ///< cells x (K+1), q = int w g dw
};

KineticMoments kinetic_moments(const KineticField& field, const KineticGrid& grid);

/// Deterministic box equilibrium M_g(w; rho) on the velocity cells: mass rho,
/// centred at V_eq(rho) + h(rho), clipped to W and renormalised.
Vector equilibrium_profile(double rho, const KineticGrid& grid);

/// M-hat(w; rho-hat), velocity_cells x (K+1). Throws NumericalError if the
/// reconstructed density leaves (0,1] at a node.
Matrix build_equilibrium(const GalerkinVector& rho, const KineticGrid& grid, const Basis& basis);

/// Residuals of the two moment conditions of one equilibrium build.
struct MomentResidual {
  double um1 = 0.0;  ///< max_i |int M_i dw - rho_i|
  double um2 = 0.0;  ///< max_i |int w M_i dw - (P(V_eq) rho + P(h) rho)_i|
};

MomentResidual equilibrium_residual(const GalerkinVector& rho, const Matrix& equilibrium,
                                    const KineticGrid& grid, const TripleProductTensor& tensor);

struct EquilibriumAudit {
  double um1_max = 0.0;
  double um2_max = 0.0;
  long builds = 0;
};

/// Field at local equilibrium for the given per-cell densities.
KineticField equilibrium_field(const Matrix& rho, const KineticGrid& grid, const Basis& basis);

/// Largest |h(rho(xi))| over cells and nodes; bounds the spectral radius of P(h(rho)).
double hesitation_bound(const Matrix& rho, const KineticGrid& grid, const Basis& basis);

/// Transport (LLF per velocity slice) then exact relaxation toward M-hat.
/// Throws NumericalError if dt (w_max + max ||P(h)||) / dx > 0.9.
KineticField bgk_step(const KineticField& field, const KineticGrid& grid,
                      const TripleProductTensor& tensor, double dt,
                      EquilibriumAudit* audit = nullptr);

struct KineticSnapshot {
  KineticField field;
  KineticMoments moments;
};

struct KineticRun {
  std::vector<KineticSnapshot> snapshots;
  std::vector<double> dt_history;
  EquilibriumAudit audit;
  double conservation_drift = 0.0;
  int steps = 0;
};

KineticRun run_kinetic(const KineticField& initial, const KineticGrid& grid,
                       const TripleProductTensor& tensor, const std::vector<double>& output_times = {});

}  // namespace sgtraffic
