#include "sgtraffic/macro.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sgtraffic {
namespace {

struct CellFluxes {
  Matrix rho;
  Matrix z;
};

int wrap(int j, int n, Boundary boundary) {
  if (boundary == Boundary::periodic) return (j % n + n) % n;
  return std::clamp(j, 0, n - 1);
}

double lwr_characteristic(const ScalarLaw& v_eq, double rho) {
  return v_eq(rho) + rho * v_eq.derivative(rho);
}

}  // namespace

std::string to_string(Boundary boundary) {
  return boundary == Boundary::periodic ? "periodic" : "outflow";
}

std::string to_string(MacroModel model) { return model == MacroModel::arz ? "arz" : "lwr"; }

void validate(const MacroGrid& grid) {
  if (!(grid.b > grid.a)) throw InvalidArgument("macro grid: need b > a");
  if (grid.cells < 1) throw InvalidArgument("macro grid: need at least one cell");
  if (!(grid.cfl > 0.0 && grid.cfl <= 1.0)) throw InvalidArgument("macro grid: CFL must be in (0,1]");
  if (!(grid.final_time >= 0.0)) throw InvalidArgument("macro grid: final time must be nonnegative");
}

GalerkinVector lwr_flux(const GalerkinVector& rho, const TripleProductTensor& tensor,
                        const ScalarLaw& v_eq) {
  return galerkin_product(rho, project_law(v_eq, rho, tensor.basis()), tensor);
}

std::pair<GalerkinVector, GalerkinVector> arz_flux(const GalerkinVector& rho,
                                                   const GalerkinVector& z,
                                                   const TripleProductTensor& tensor,
                                                   const ScalarLaw& hesitation) {
  require_size(z, tensor.size(), "arz_flux");
  const GalerkinVector h = project_law(hesitation, rho, tensor.basis());
  // w-hat = P^{-1}(rho) z is the Galerkin Riemann invariant
  const GalerkinVector w = galerkin_solve(rho, z, tensor);
  GalerkinVector flux_rho = z - galerkin_product(rho, h, tensor);
  GalerkinVector flux_z = galerkin_product(z, w, tensor) - galerkin_product(z, h, tensor);
  return {std::move(flux_rho), std::move(flux_z)};
}

double cell_wave_speed(const MacroField& field, int cell, const MacroModelSpec& spec,
                       const Basis& basis) {
  const Vector rho = basis.to_collocation(field.rho.row(cell).transpose());
  double speed = 0.0;
  if (field.model == MacroModel::lwr) {
    for (Eigen::Index q = 0; q < rho.size(); ++q) {
      speed = std::max(speed, std::abs(lwr_characteristic(spec.v_eq, rho[q])));
    }
  } else {
    const Vector z = basis.to_collocation(field.z.row(cell).transpose());
    for (Eigen::Index q = 0; q < rho.size(); ++q) {
      const double v = z[q] / rho[q] - spec.hesitation(rho[q]);
      const double second = v - rho[q] * spec.hesitation.derivative(rho[q]);
      speed = std::max({speed, std::abs(v), std::abs(second)});
    }
  }
  if (!std::isfinite(speed)) {
    throw NumericalError(fmt::format("non-finite wave speed in cell {}", cell));
  }
  return std::max(kWaveSpeedSafety * speed, kMinWaveSpeed);
}

double max_wave_speed(const MacroField& field, const MacroModelSpec& spec, const Basis& basis) {
  double lambda = kMinWaveSpeed;
  for (int j = 0; j < field.cells(); ++j) {
    lambda = std::max(lambda, cell_wave_speed(field, j, spec, basis));
  }
  return lambda;
}

GalerkinVector llf_numerical_flux(const GalerkinVector& left, const GalerkinVector& right,
                                  const GalerkinVector& flux_left, const GalerkinVector& flux_right,
                                  double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("llf_numerical_flux: lambda must be positive");
  return 0.5 * (flux_left + flux_right) - (0.5 * lambda) * (right - left);
}

GalerkinVector llf_numerical_flux(const GalerkinVector& left, const GalerkinVector& right,
                                  const std::function<GalerkinVector(const GalerkinVector&)>& flux,
                                  double lambda) {
  return llf_numerical_flux(left, right, flux(left), flux(right), lambda);
}

void check_density_range(const MacroField& field, const Basis& basis, double margin) {
  const auto nodes = basis.collocation_nodes();
  for (int j = 0; j < field.cells(); ++j) {
    const Vector rho = basis.to_collocation(field.rho.row(j).transpose());
    for (Eigen::Index q = 0; q < rho.size(); ++q) {
      if (!(rho[q] >= -margin && rho[q] <= 1.0 + margin)) {
        throw NumericalError(fmt::format("density {:.9g} out of range in cell {} at xi={:.6g} (t={:.6g})",
                                         rho[q], j, nodes[static_cast<std::size_t>(q)], field.time));
      }
    }
  }
}

double stable_time_step(const MacroField& field, const MacroGrid& grid, const MacroModelSpec& spec,
                        const Basis& basis) {
  return grid.cfl * grid.dx() / max_wave_speed(field, spec, basis);
}

MacroField fv_step(const MacroField& field, const MacroGrid& grid, const MacroModelSpec& spec,
                   const TripleProductTensor& tensor, double dt) {
  const Basis& basis = tensor.basis();
  const int n = field.cells();
  const int modes = tensor.size();
  const bool arz = field.model == MacroModel::arz;
  if (field.rho.cols() != modes || (arz && (field.z.rows() != n || field.z.cols() != modes))) {
    throw InvalidArgument("fv_step: field does not match the basis");
  }
  if (!(dt > 0.0)) throw InvalidArgument("fv_step: dt must be positive");

  CellFluxes f{Matrix(n, modes), arz ? Matrix(n, modes) : Matrix()};
  std::vector<double> lambda(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const GalerkinVector rho = field.rho.row(j).transpose();
    if (arz) {
      const auto [fr, fz] = arz_flux(rho, field.z.row(j).transpose(), tensor, spec.hesitation);
      f.rho.row(j) = fr.transpose();
      f.z.row(j) = fz.transpose();
    } else {
      f.rho.row(j) = lwr_flux(rho, tensor, spec.v_eq).transpose();
    }
    lambda[static_cast<std::size_t>(j)] = cell_wave_speed(field, j, spec, basis);
  }

  // interface i sits between cells i-1 and i, i = 0..n
  Matrix flux_rho(n + 1, modes);
  Matrix flux_z = arz ? Matrix(n + 1, modes) : Matrix();
  for (int i = 0; i <= n; ++i) {
    if (grid.boundary == Boundary::periodic && i == n) {
      flux_rho.row(n) = flux_rho.row(0);
      if (arz) flux_z.row(n) = flux_z.row(0);
      continue;
    }
    const int l = wrap(i - 1, n, grid.boundary);
    const int r = wrap(i, n, grid.boundary);
    const double speed = std::max(lambda[static_cast<std::size_t>(l)], lambda[static_cast<std::size_t>(r)]);
    flux_rho.row(i) = (0.5 * (f.rho.row(l) + f.rho.row(r)) -
                       (0.5 * speed) * (field.rho.row(r) - field.rho.row(l)));
    if (arz) {
      flux_z.row(i) = (0.5 * (f.z.row(l) + f.z.row(r)) -
                       (0.5 * speed) * (field.z.row(r) - field.z.row(l)));
    }
  }

  MacroField next = field;
  const double ratio = dt / grid.dx();
  for (int j = 0; j < n; ++j) {
    next.rho.row(j) -= ratio * (flux_rho.row(j + 1) - flux_rho.row(j));
    if (arz) next.z.row(j) -= ratio * (flux_z.row(j + 1) - flux_z.row(j));
  }

  if (arz && std::isfinite(spec.relaxation_time)) {
    const double decay = std::exp(-dt / spec.relaxation_time);
    for (int j = 0; j < n; ++j) {
      const GalerkinVector rho = next.rho.row(j).transpose();
      const GalerkinVector desired =
          project_law(spec.v_eq, rho, basis) + project_law(spec.hesitation, rho, basis);
      const GalerkinVector target = galerkin_product(rho, desired, tensor);
      next.z.row(j) = (target + (next.z.row(j).transpose() - target) * decay).transpose();
    }
  }
  next.time = field.time + dt;
  check_density_range(next, basis);
  return next;
}

MacroField init_riemann(const MacroGrid& grid, const MacroModelSpec& spec, const Basis& basis,
                        const RiemannData& data) {
  validate(grid);
  for (double v : {data.left_min, data.left_max, data.right}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument(fmt::format("init_riemann: density {} outside [0,1]", v));
    }
  }
  const auto left_density = [&](double xi) {
    return data.left_min + (data.left_max - data.left_min) * xi;
  };
  const GalerkinVector left = project_function(left_density, basis);
  GalerkinVector right = GalerkinVector::Zero(basis.size());
  right[0] = data.right;

  MacroField field;
  field.model = spec.model;
  field.rho.resize(grid.cells, basis.size());
  if (spec.model == MacroModel::arz) field.z.resize(grid.cells, basis.size());

  GalerkinVector z_left;
  GalerkinVector z_right;
  if (spec.model == MacroModel::arz) {
    const auto z_of = [&](double rho) { return rho * (spec.v_eq(rho) + spec.hesitation(rho)); };
    z_left = project_function([&](double xi) { return z_of(left_density(xi)); }, basis);
    z_right = GalerkinVector::Zero(basis.size());
    z_right[0] = z_of(data.right);
  }
  for (int j = 0; j < grid.cells; ++j) {
    const bool is_left = grid.center(j) < data.split;
    field.rho.row(j) = (is_left ? left : right).transpose();
    if (spec.model == MacroModel::arz) field.z.row(j) = (is_left ? z_left : z_right).transpose();
  }
  return field;
}

Vector mode_mass(const Matrix& cells, double dx) {
  return cells.colwise().sum().transpose() * dx;
}

std::vector<double> macro_output_times(const MacroRunConfig& config) {
  std::vector<double> times{0.0};
  for (double t : config.output_times) {
    if (t > 0.0 && t < config.grid.final_time) times.push_back(t);
  }
  if (config.grid.final_time > 0.0) times.push_back(config.grid.final_time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

MacroRun run_macro(const MacroField& initial, const MacroRunConfig& config,
                   const TripleProductTensor& tensor) {
  validate(config.grid);
  const Basis& basis = tensor.basis();
  if (initial.model != config.spec.model) throw InvalidArgument("run_macro: model tag mismatch");
  if (initial.cells() != config.grid.cells) throw InvalidArgument("run_macro: cell count mismatch");
  if (initial.model == MacroModel::arz) {
    const HyperbolicityReport report = check_hyperbolicity(tensor);
    if (!report.passed) {
      throw InvalidArgument(
          "run_macro: the Galerkin ARZ system needs a basis with commuting Galerkin matrices and "
          "constant eigenvectors (polynomial bases do not qualify): " + report.a1_detail);
    }
  }
  check_density_range(initial, basis);

  std::vector<double> outputs = macro_output_times(config);
  outputs.erase(outputs.begin());

  MacroRun run;
  run.snapshots.push_back(initial);
  const Vector mass0 = mode_mass(initial.rho, config.grid.dx());
  const double scale = std::max(std::abs(mass0[0]), 1e-300);

  MacroField field = initial;
  std::size_t next = 0;
  const double eps = 1e-14 * std::max(1.0, config.grid.final_time);
  while (next < outputs.size()) {
    const double target = outputs[next];
    if (field.time >= target - eps) {
      field.time = target;
      run.snapshots.push_back(field);
      ++next;
      continue;
    }
    const double lambda = max_wave_speed(field, config.spec, basis);
    double dt = config.grid.cfl * config.grid.dx() / lambda;
    const bool hits = field.time + dt >= target - eps;
    if (hits) dt = target - field.time;
    field = fv_step(field, config.grid, config.spec, tensor, dt);
    if (hits) field.time = target;
    run.dt_history.push_back(dt);
    run.lambda_history.push_back(lambda);
    ++run.steps;
    const Vector mass = mode_mass(field.rho, config.grid.dx());
    run.conservation_drift = std::max(run.conservation_drift, (mass - mass0).cwiseAbs().maxCoeff() / scale);
  }
  return run;
}

}  // namespace sgtraffic
