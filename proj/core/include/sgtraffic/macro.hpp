#pragma once

// Finite-volume stochastic Galerkin solvers for the LWR and ARZ traffic
// models with local Lax-Friedrichs fluxes.

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sgtraffic/chaos.hpp"
#include "sgtraffic/laws.hpp"

namespace sgtraffic {

enum class Boundary { outflow, periodic };
enum class MacroModel { lwr, arz };

std::string to_string(Boundary boundary);
std::string to_string(MacroModel model);

struct MacroGrid {
  double a = 0.0;
  double b = 2.0;
  int cells = 200;
  double final_time = 1.0;
  double cfl = 0.45;
  Boundary boundary = Boundary::outflow;

  double dx() const { return (b - a) / cells; }
  double center(int j) const { return a + (j + 0.5) * dx(); }
};

void validate(const MacroGrid& grid);

struct MacroModelSpec {
  MacroModel model = MacroModel::lwr;
  ScalarLaw v_eq = greenshields_law();
  ScalarLaw hesitation = linear_hesitation();
  /// Relaxation time of the ARZ source; infinity runs the homogeneous system.
  double relaxation_time = std::numeric_limits<double>::infinity();
};

/// Per-cell coefficient rows: rho is cells x (K+1), z likewise for ARZ.
struct MacroField {
  MacroModel model = MacroModel::lwr;
  Matrix rho;
  Matrix z;
  double time = 0.0;

  int cells() const { return static_cast<int>(rho.rows()); }
};

/// Range checks on reconstructed densities are done to within this margin.
inline constexpr double kDensityMargin = 1e-8;
/// Lower bound for the LLF dissipation speed.
inline constexpr double kMinWaveSpeed = 1e-6;
inline constexpr double kWaveSpeedSafety = 1.1;

/// P(rho) V_eq(rho); for the default law V_eq-hat = e_1 - rho.
GalerkinVector lwr_flux(const GalerkinVector& rho, const TripleProductTensor& tensor,
                        const ScalarLaw& v_eq = greenshields_law());

/// (z - P(rho) h(rho), P(z) P^{-1}(rho) z - P(z) h(rho)).
std::pair<GalerkinVector, GalerkinVector> arz_flux(const GalerkinVector& rho,
                                                   const GalerkinVector& z,
                                                   const TripleProductTensor& tensor,
                                                   const ScalarLaw& hesitation = linear_hesitation());

/// Wave-speed bound of one cell from xi-node samples, with safety factor and floor.
double cell_wave_speed(const MacroField& field, int cell, const MacroModelSpec& spec,
                       const Basis& basis);

double max_wave_speed(const MacroField& field, const MacroModelSpec& spec, const Basis& basis);

/// 0.5 (f(U_L) + f(U_R)) - 0.5 lambda (U_R - U_L).
GalerkinVector llf_numerical_flux(const GalerkinVector& left, const GalerkinVector& right,
                                  const GalerkinVector& flux_left, const GalerkinVector& flux_right,
                                  double lambda);

GalerkinVector llf_numerical_flux(const GalerkinVector& left, const GalerkinVector& right,
                                  const std::function<GalerkinVector(const GalerkinVector&)>& flux,
                                  double lambda);

/// Throws NumericalError naming the cell and xi-node when a reconstructed
/// density leaves [-margin, 1 + margin] or is not finite.
void check_density_range(const MacroField& field, const Basis& basis,
                         double margin = kDensityMargin);

/// CFL * dx / lambda.
double stable_time_step(const MacroField& field, const MacroGrid& grid, const MacroModelSpec& spec,
                        const Basis& basis);

/// One conservative LLF step, followed by exact relaxation of z when the
/// ARZ source is active.
MacroField fv_step(const MacroField& field, const MacroGrid& grid, const MacroModelSpec& spec,
                   const TripleProductTensor& tensor, double dt);

struct RiemannData {
  double left_min = 0.75;  ///< u_1: rho_l = u_1 + (u_2 - u_1) xi
  double left_max = 0.95;  ///< u_2
  double right = 0.2;      ///< rho_r, deterministic
  double split = 1.0;
};

/// Riemann initial data. For ARZ, z = rho (V_eq(rho) + h(rho)), i.e. the
/// initial velocity is the equilibrium one.
MacroField init_riemann(const MacroGrid& grid, const MacroModelSpec& spec, const Basis& basis,
                        const RiemannData& data);

struct MacroRunConfig {
  MacroGrid grid;
  MacroModelSpec spec;
  std::vector<double> output_times;  ///< final time always recorded
};

struct MacroRun {
  std::vector<MacroField> snapshots;
  std::vector<double> dt_history;
  std::vector<double> lambda_history;
  /// max_k |sum_j rho_jk - sum_j rho_jk(0)| dx, relative to the initial mass.
  double conservation_drift = 0.0;
  int steps = 0;
};

/// Runs to grid.final_time. ARZ runs refuse to start on a basis that fails
/// the hyperbolicity certificate.
/// Snapshot times of a run: 0, the requested times inside (0, T), and T.
std::vector<double> macro_output_times(const MacroRunConfig& config);

MacroRun run_macro(const MacroField& initial, const MacroRunConfig& config,
                   const TripleProductTensor& tensor);

/// Per-mode total mass sum_j u_jk dx.
Vector mode_mass(const Matrix& cells, double dx);

}  // namespace sgtraffic
