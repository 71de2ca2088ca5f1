#include "sgtraffic/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "sgtraffic/analysis.hpp"
#include "sgtraffic/parallel.hpp"

namespace sgtraffic {
namespace {

// Linear interpolation of cell-centred coefficient rows at x.
GalerkinVector interpolate(const Matrix& rows, const MacroGrid& grid, double x) {
  const double u = (x - grid.a) / grid.dx() - 0.5;
  const int j = static_cast<int>(std::floor(u));
  const double theta = u - j;
  const int j0 = std::clamp(j, 0, grid.cells - 1);
  const int j1 = std::clamp(j + 1, 0, grid.cells - 1);
  return (1.0 - theta) * rows.row(j0).transpose() + theta * rows.row(j1).transpose();
}

bool is_zero_law(const ScalarLaw& law) {
  return law.affine && law.affine->first == 0.0 && law.affine->second == 0.0;
}

}  // namespace

MicroState riemann_platoon(const Micro2MacroConfig& config, int resolution, const Basis& basis,
                           MicroParams* params) {
  const RiemannData& d = config.riemann;
  if (resolution < 1) throw InvalidArgument("micro2macro: resolution must be positive");
  if (!(d.right > 0.0)) throw InvalidArgument("micro2macro: right density must be positive");
  if (!(d.left_min > 0.0)) throw InvalidArgument("micro2macro: left density must be positive");
  if (!(config.buffer >= 0.0)) throw InvalidArgument("micro2macro: buffer must be nonnegative");

  const double length = 1.0 / resolution;
  const double lead = config.grid.b + config.buffer;
  const double tail = config.grid.a - config.buffer;
  const double right_mass = d.right * (lead - d.split);
  const double left_mass = d.left_min * (d.split - tail);
  const int vehicles = static_cast<int>(std::ceil((right_mass + left_mass) / length)) + 1;

  // invert the cumulative density from the leader backwards
  const auto position = [&](int i, double xi) {
    const double left = d.left_min + (d.left_max - d.left_min) * xi;
    const double mass = (vehicles - 1 - i) * length;
    if (mass <= right_mass) return lead - mass / d.right;
    return d.split - (mass - right_mass) / left;
  };

  if (params != nullptr) {
    params->vehicles = vehicles;
    params->length = length;
    const ScalarLaw v = config.spec.v_eq;
    params->speed = [v](double y) { return std::max(0.0, v(std::min(y, 1.0))); };
    params->leader_speed = v(d.right);
  }
  return make_micro_state(vehicles, position, basis);
}

Micro2MacroResult run_micro2macro(const Micro2MacroConfig& config, const TripleProductTensor& tensor) {
  if (config.spec.model != MacroModel::lwr) throw InvalidArgument("micro2macro: needs the LWR model");
  if (config.resolutions.empty()) throw InvalidArgument("micro2macro: empty resolution list");
  if (!std::is_sorted(config.resolutions.begin(), config.resolutions.end())) {
    throw InvalidArgument("micro2macro: resolutions must be ascending");
  }
  if (!(config.dt_factor > 0.0)) throw InvalidArgument("micro2macro: dt factor must be positive");
  const Basis& basis = tensor.basis();

  MacroGrid reference_grid = config.grid;
  reference_grid.cells = config.reference_cells;
  const MacroRunConfig macro_config{reference_grid, config.spec, {}};

  Micro2MacroResult result;
  result.reference =
      run_macro(init_riemann(reference_grid, config.spec, basis, config.riemann), macro_config, tensor);
  const MacroField& macro = result.reference.snapshots.back();

  const std::size_t count = config.resolutions.size();
  result.rows.resize(count);
  result.final_states.resize(count);
  parallel_for(count, config.workers, [&](std::size_t r) {
    const int n = config.resolutions[r];
    MicroParams params;
    const MicroState initial = riemann_platoon(config, n, basis, &params);
    MicroRunOptions options;
    options.dt = config.dt_factor * params.length;
    options.final_time = config.grid.final_time;
    const std::vector<MicroState> states = integrate_micro(initial, params, tensor, options);
    const MicroState& last = states.back();
    const Matrix density = reconstruct_local_density(last, params, basis);

    Micro2MacroRow row{n, params.length, params.vehicles, options.dt, 0.0, 0.0};
    for (int i = 0; i + 1 < params.vehicles; ++i) {
      const double xl = last.positions(i, 0);
      const double xr = last.positions(i + 1, 0);
      const double mid = 0.5 * (xl + xr);
      if (mid < config.grid.a || mid > config.grid.b) continue;
      const GalerkinVector ref = interpolate(macro.rho, reference_grid, mid);
      const GalerkinVector rho = density.row(i).transpose();
      row.l1_mean += std::abs(mean(rho) - mean(ref)) * (xr - xl);
      row.l1_variance += std::abs(variance(rho) - variance(ref)) * (xr - xl);
    }
    result.rows[r] = row;
    result.final_states[r] = last;
  });
  return result;
}

MacroGrid macro_grid_of(const KineticGrid& grid) {
  MacroGrid out;
  out.a = grid.a;
  out.b = grid.b;
  out.cells = grid.cells;
  out.final_time = grid.final_time;
  out.boundary = grid.boundary;
  return out;
}

Meso2MacroResult run_meso2macro(const Meso2MacroConfig& config, const TripleProductTensor& tensor) {
  if (config.relaxations.empty()) throw InvalidArgument("meso2macro: empty relaxation list");
  if (!std::is_sorted(config.relaxations.rbegin(), config.relaxations.rend())) {
    throw InvalidArgument("meso2macro: relaxation times must be descending");
  }
  const Basis& basis = tensor.basis();
  const MacroGrid grid = macro_grid_of(config.kinetic);

  Meso2MacroResult result;
  result.compared_to_lwr = is_zero_law(config.kinetic.hesitation);

  MacroModelSpec spec;
  spec.model = result.compared_to_lwr ? MacroModel::lwr : MacroModel::arz;
  spec.v_eq = config.kinetic.v_eq;
  spec.hesitation = config.kinetic.hesitation;
  const Matrix rho0 = init_riemann(grid, MacroModelSpec{}, basis, config.riemann).rho;

  result.rows.resize(config.relaxations.size());
  parallel_for(config.relaxations.size(), config.workers, [&](std::size_t r) {
    KineticGrid kgrid = config.kinetic;
    kgrid.relaxation = config.relaxations[r];
    const KineticField initial = equilibrium_field(rho0, kgrid, basis);
    const KineticMoments m0 = kinetic_moments(initial, kgrid);
    const KineticRun kinetic = run_kinetic(initial, kgrid, tensor, {});

    MacroModelSpec local = spec;
    if (!result.compared_to_lwr) local.relaxation_time = kgrid.relaxation;
    MacroField macro0;
    macro0.model = local.model;
    macro0.rho = m0.rho;
    if (local.model == MacroModel::arz) macro0.z = m0.q;
    const MacroRun macro = run_macro(macro0, MacroRunConfig{grid, local, {}}, tensor);

    const KineticMoments& km = kinetic.snapshots.back().moments;
    const MacroField& mf = macro.snapshots.back();
    Meso2MacroRow row;
    row.relaxation = kgrid.relaxation;
    row.l1_rho = (km.rho - mf.rho).cwiseAbs().sum() * grid.dx();
    if (local.model == MacroModel::arz) {
      row.l1_q = (km.q - mf.z).cwiseAbs().sum() * grid.dx();
    } else {
      // h = 0: q is the LWR flux
      for (int j = 0; j < grid.cells; ++j) {
        const GalerkinVector flux = lwr_flux(mf.rho.row(j).transpose(), tensor, spec.v_eq);
        row.l1_q += (km.q.row(j).transpose() - flux).cwiseAbs().sum() * grid.dx();
      }
    }
    row.l1_total = row.l1_rho + row.l1_q;

    // kinetic initial moments vs the projected Riemann datum
    row.initial_mismatch = (m0.rho - rho0).cwiseAbs().maxCoeff();
    row.um1_max = kinetic.audit.um1_max;
    row.um2_max = kinetic.audit.um2_max;
    row.builds = kinetic.audit.builds;
    row.kinetic_steps = kinetic.steps;
    row.macro_steps = macro.steps;
    result.rows[r] = row;
  });
  return result;
}

}  // namespace sgtraffic
