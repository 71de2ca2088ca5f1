#include "sgtraffic/kinetic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sgtraffic {
namespace {

constexpr double kCflLimit = 0.9;

int neighbour(int j, int n, Boundary boundary) {
  if (boundary == Boundary::periodic) return (j % n + n) % n;
  return std::clamp(j, 0, n - 1);
}

}  // namespace

void validate(const KineticGrid& grid) {
  if (!(grid.b > grid.a) || grid.cells < 1) throw InvalidArgument("kinetic grid: bad space interval");
  if (grid.velocity_cells < 1 || !(grid.w_max > 0.0)) {
    throw InvalidArgument("kinetic grid: bad velocity interval");
  }
  if (!(grid.relaxation > 0.0)) throw InvalidArgument("kinetic grid: epsilon must be positive");
  if (!(grid.cfl > 0.0 && grid.cfl <= kCflLimit)) {
    throw InvalidArgument("kinetic grid: CFL must be in (0, 0.9]");
  }
  if (grid.hesitation(0.0) < 0.0) throw InvalidArgument("kinetic grid: h(0) must be nonnegative");
  double previous = grid.hesitation(0.0);
  for (int k = 1; k <= 100; ++k) {
    const double value = grid.hesitation(k / 100.0);
    if (value < previous - 1e-14) throw InvalidArgument("kinetic grid: h must be nondecreasing");
    previous = value;
  }
}

KineticMoments kinetic_moments(const KineticField& field, const KineticGrid& grid) {
  const Eigen::Index modes = field.g.cols();
  KineticMoments out{Matrix::Zero(field.cells, modes), Matrix::Zero(field.cells, modes)};
  const double dw = grid.dw();
  for (int j = 0; j < field.cells; ++j) {
    for (int m = 0; m < field.velocity_cells; ++m) {
      const auto g = field.g.row(field.row(j, m));
      out.rho.row(j) += dw * g;
      out.q.row(j) += (grid.speed(m) * dw) * g;
    }
  }
  return out;
}

Vector equilibrium_profile(double rho, const KineticGrid& grid) {
  const int n = grid.velocity_cells;
  const double dw = grid.dw();
  const double half = 0.5 * grid.equilibrium_width();
  const double mean = std::clamp(grid.v_eq(rho) + grid.hesitation(rho), 0.0, grid.w_max);
  const double lo = std::max(mean - half, 0.0);
  const double hi = std::min(mean + half, grid.w_max);
  Vector profile = Vector::Zero(n);
  double total = 0.0;
  for (int m = 0; m < n; ++m) {
    const double overlap = std::min(hi, (m + 1) * dw) - std::max(lo, m * dw);
    if (overlap > 0.0) {
      profile[m] = overlap;
      total += overlap;
    }
  }
  if (total <= 0.0) {
    // degenerate box (zero width): all mass in the cell holding the mean
    const int m = std::min(static_cast<int>(mean / dw), n - 1);
    profile[m] = 1.0;
    total = 1.0;
  }
  return profile * (rho / (total * dw));
}

Matrix build_equilibrium(const GalerkinVector& rho, const KineticGrid& grid, const Basis& basis) {
  const Vector nodal = basis.to_collocation(rho);
  const auto nodes = basis.collocation_nodes();
  const auto w = basis.collocation_weights();
  const Matrix& phi = basis.collocation_values();
  Matrix out = Matrix::Zero(grid.velocity_cells, basis.size());
  for (Eigen::Index q = 0; q < nodal.size(); ++q) {
    const double r = nodal[q];
    if (!(r > 0.0 && r <= 1.0 + kDensityMargin)) {
      throw NumericalError(fmt::format("equilibrium: density {:.9g} outside (0,1] at xi={:.6g}", r,
                                       nodes[static_cast<std::size_t>(q)]));
    }
    out.noalias() += equilibrium_profile(r, grid) * (w[static_cast<std::size_t>(q)] * phi.row(q));
  }
  return out;
}

MomentResidual equilibrium_residual(const GalerkinVector& rho, const Matrix& equilibrium,
                                    const KineticGrid& grid, const TripleProductTensor& tensor) {
  const double dw = grid.dw();
  GalerkinVector mass = GalerkinVector::Zero(tensor.size());
  GalerkinVector flux = GalerkinVector::Zero(tensor.size());
  for (int m = 0; m < grid.velocity_cells; ++m) {
    mass += dw * equilibrium.row(m).transpose();
    flux += (grid.speed(m) * dw) * equilibrium.row(m).transpose();
  }
  const Basis& basis = tensor.basis();
  const GalerkinVector desired =
      project_law(grid.v_eq, rho, basis) + project_law(grid.hesitation, rho, basis);
  const GalerkinVector expected = galerkin_product(desired, rho, tensor);
  return {(mass - rho).cwiseAbs().maxCoeff(), (flux - expected).cwiseAbs().maxCoeff()};
}

KineticField equilibrium_field(const Matrix& rho, const KineticGrid& grid, const Basis& basis) {
  KineticField field;
  field.cells = static_cast<int>(rho.rows());
  field.velocity_cells = grid.velocity_cells;
  field.g.resize(static_cast<Eigen::Index>(field.cells) * grid.velocity_cells, basis.size());
  for (int j = 0; j < field.cells; ++j) {
    field.g.middleRows(field.row(j, 0), grid.velocity_cells) =
        build_equilibrium(rho.row(j).transpose(), grid, basis);
  }
  return field;
}

double hesitation_bound(const Matrix& rho, const KineticGrid& grid, const Basis& basis) {
  double bound = 0.0;
  for (Eigen::Index j = 0; j < rho.rows(); ++j) {
    const Vector nodal = basis.to_collocation(rho.row(j).transpose());
    for (Eigen::Index q = 0; q < nodal.size(); ++q) {
      bound = std::max(bound, std::abs(grid.hesitation(nodal[q])));
    }
  }
  return bound;
}

KineticField bgk_step(const KineticField& field, const KineticGrid& grid,
                      const TripleProductTensor& tensor, double dt, EquilibriumAudit* audit) {
  const Basis& basis = tensor.basis();
  const int nx = field.cells;
  const int nw = field.velocity_cells;
  const int modes = tensor.size();
  if (field.g.cols() != modes || nw != grid.velocity_cells || nx != grid.cells) {
    throw InvalidArgument("bgk_step: field does not match grid or basis");
  }
  if (!(dt > 0.0)) throw InvalidArgument("bgk_step: dt must be positive");

  // transport: rho-hat and P(h(rho-hat)) frozen over the substep
  const KineticMoments moments = kinetic_moments(field, grid);
  std::vector<Matrix> advection(static_cast<std::size_t>(nx));
  std::vector<double> h_bound(static_cast<std::size_t>(nx));
  double global_bound = 0.0;
  for (int j = 0; j < nx; ++j) {
    const GalerkinVector rho = moments.rho.row(j).transpose();
    advection[static_cast<std::size_t>(j)] =
        galerkin_matrix(project_law(grid.hesitation, rho, basis), tensor);
    const Vector nodal = basis.to_collocation(rho);
    double bound = 0.0;
    for (Eigen::Index q = 0; q < nodal.size(); ++q) {
      bound = std::max(bound, std::abs(grid.hesitation(nodal[q])));
    }
    h_bound[static_cast<std::size_t>(j)] = bound;
    global_bound = std::max(global_bound, bound);
  }
  const double courant = dt * (grid.w_max + global_bound) / grid.dx();
  if (courant > kCflLimit + 1e-12) {
    throw NumericalError(fmt::format("bgk_step: CFL number {:.4f} exceeds {}", courant, kCflLimit));
  }

  Matrix flux(field.g.rows(), modes);
  for (int j = 0; j < nx; ++j) {
    const Matrix& p = advection[static_cast<std::size_t>(j)];
    for (int m = 0; m < nw; ++m) {
      const auto g = field.g.row(field.row(j, m)).transpose();
      flux.row(field.row(j, m)) = (grid.speed(m) * g - p * g).transpose();
    }
  }

  KineticField next = field;
  const double ratio = dt / grid.dx();
  Matrix interface_flux(nx + 1, modes);
  for (int m = 0; m < nw; ++m) {
    const double w = grid.speed(m);
    for (int i = 0; i <= nx; ++i) {
      if (grid.boundary == Boundary::periodic && i == nx) {
        interface_flux.row(nx) = interface_flux.row(0);
        continue;
      }
      const int l = neighbour(i - 1, nx, grid.boundary);
      const int r = neighbour(i, nx, grid.boundary);
      const double lambda = std::abs(w) + std::max(h_bound[static_cast<std::size_t>(l)],
                                                   h_bound[static_cast<std::size_t>(r)]);
      interface_flux.row(i) =
          0.5 * (flux.row(field.row(l, m)) + flux.row(field.row(r, m))) -
          (0.5 * lambda) * (field.g.row(field.row(r, m)) - field.g.row(field.row(l, m)));
    }
    for (int j = 0; j < nx; ++j) {
      next.g.row(next.row(j, m)) -= ratio * (interface_flux.row(j + 1) - interface_flux.row(j));
    }
  }

  // relaxation, solved exactly: g <- M + (g - M) exp(-dt/eps)
  const double decay = std::exp(-dt / grid.relaxation);
  const KineticMoments transported = kinetic_moments(next, grid);
  for (int j = 0; j < nx; ++j) {
    const GalerkinVector rho = transported.rho.row(j).transpose();
    if (rho[0] < -1e-12) {
      throw NumericalError(fmt::format("bgk_step: negative mean density {:.3e} in cell {}", rho[0], j));
    }
    Matrix eq;
    try {
      eq = build_equilibrium(rho, grid, basis);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("bgk_step: cell {} at t={:.6g}: {}", j, field.time + dt, e.what()));
    }
    if (audit != nullptr) {
      const MomentResidual res = equilibrium_residual(rho, eq, grid, tensor);
      audit->um1_max = std::max(audit->um1_max, res.um1);
      audit->um2_max = std::max(audit->um2_max, res.um2);
      ++audit->builds;
    }
    auto block = next.g.middleRows(next.row(j, 0), nw);
    block = eq + (block - eq) * decay;
  }
  next.time = field.time + dt;
  return next;
}

KineticRun run_kinetic(const KineticField& initial, const KineticGrid& grid,
                       const TripleProductTensor& tensor, const std::vector<double>& output_times) {
  validate(grid);
  const Basis& basis = tensor.basis();
  std::vector<double> outputs;
  for (double t : output_times) {
    if (t > 0.0 && t < grid.final_time) outputs.push_back(t);
  }
  if (grid.final_time > 0.0) outputs.push_back(grid.final_time);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());

  KineticRun run;
  KineticField field = initial;
  run.snapshots.push_back({field, kinetic_moments(field, grid)});
  const Vector mass0 = mode_mass(run.snapshots.front().moments.rho, grid.dx());
  const double scale = std::max(std::abs(mass0[0]), 1e-300);
  const double eps = 1e-14 * std::max(1.0, grid.final_time);
  std::size_t next = 0;
  while (next < outputs.size()) {
    const double target = outputs[next];
    if (field.time >= target - eps) {
      field.time = target;
      run.snapshots.push_back({field, kinetic_moments(field, grid)});
      ++next;
      continue;
    }
    const KineticMoments moments = kinetic_moments(field, grid);
    const double bound = hesitation_bound(moments.rho, grid, basis);
    double dt = grid.cfl * grid.dx() / (grid.w_max + bound);
    const bool hits = field.time + dt >= target - eps;
    if (hits) dt = target - field.time;
    field = bgk_step(field, grid, tensor, dt, &run.audit);
    if (hits) field.time = target;
    run.dt_history.push_back(dt);
    ++run.steps;
    const Vector mass = mode_mass(kinetic_moments(field, grid).rho, grid.dx());
    run.conservation_drift = std::max(run.conservation_drift, (mass - mass0).cwiseAbs().maxCoeff() / scale);
  }
  return run;
}

}  // namespace sgtraffic
