#include "sgtraffic/micro.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sgtraffic {
namespace {

// Headway values of all followers at the nodes of the chosen rule:
// row i holds x_{i+1}(xi_q) - x_i(xi_q) (+ noise * xi_q).
struct NodalHeadways {
  Matrix values;  // (N-1) x Q
  Matrix phi;
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite Gauss rule on every finest Haar cell: the basis is constant
// there, and the integrand s(L / (gap + noise xi)) is smooth.
void smooth_rule(const Basis& basis, std::vector<double>& nodes, std::vector<double>& weights) {
  constexpr int kSubcells = 4;
  constexpr int kGauss = 10;
  if (basis.family() != BasisFamily::haar) {
    nodes.assign(basis.nodes().begin(), basis.nodes().end());
    weights.assign(basis.weights().begin(), basis.weights().end());
    return;
  }
  const Basis gauss = build_basis({BasisFamily::legendre, 0, kGauss});
  const int pieces = basis.size() * kSubcells;
  const double width = 1.0 / pieces;
  for (int c = 0; c < pieces; ++c) {
    for (int g = 0; g < kGauss; ++g) {
      nodes.push_back((c + gauss.nodes()[static_cast<std::size_t>(g)]) * width);
      weights.push_back(gauss.weights()[static_cast<std::size_t>(g)] * width);
    }
  }
}

NodalHeadways nodal_headways(const Matrix& positions, double noise, const Basis& basis) {
  NodalHeadways out;
  // positions live in the span, so the collocation rule is exact unless the
  // headway also carries an explicit xi term
  if (noise != 0.0) {
    smooth_rule(basis, out.nodes, out.weights);
    out.phi.resize(static_cast<Eigen::Index>(out.nodes.size()), basis.size());
    for (std::size_t q = 0; q < out.nodes.size(); ++q) {
      for (int k = 0; k < basis.size(); ++k) out.phi(static_cast<Eigen::Index>(q), k) = basis.evaluate(k, out.nodes[q]);
    }
  } else {
    out.phi = basis.collocation_values();
    out.nodes.assign(basis.collocation_nodes().begin(), basis.collocation_nodes().end());
    out.weights.assign(basis.collocation_weights().begin(), basis.collocation_weights().end());
  }
  const Eigen::Index n = positions.rows();
  const Matrix gaps = positions.bottomRows(n - 1) - positions.topRows(n - 1);
  out.values = gaps * out.phi.transpose();
  if (noise != 0.0) {
    for (Eigen::Index q = 0; q < out.values.cols(); ++q) {
      out.values.col(q).array() += noise * out.nodes[static_cast<std::size_t>(q)];
    }
  }
  return out;
}

Matrix project_rows(const Matrix& values, const NodalHeadways& grid) {
  const Eigen::Map<const Vector> w(grid.weights.data(), static_cast<Eigen::Index>(grid.weights.size()));
  return values * w.asDiagonal() * grid.phi;
}

void check_headway(double headway, Eigen::Index vehicle, double xi) {
  if (!(headway > 0.0)) {
    throw NumericalError(fmt::format(
        "nonpositive headway {:.6g} behind vehicle {} at xi={:.6g}", headway, vehicle + 1, xi));
  }
}

void check_ordering(const MicroState& state) {
  for (Eigen::Index i = 0; i + 1 < state.positions.rows(); ++i) {
    if (!(state.positions(i + 1, 0) > state.positions(i, 0))) {
      throw NumericalError(fmt::format("mean positions not ordered at vehicle {} (t={:.6g})", i,
                                       state.time));
    }
  }
}

}  // namespace

double greenshields_speed(double local_density) { return std::clamp(1.0 - local_density, 0.0, 1.0); }

void validate(const MicroParams& params) {
  if (params.vehicles < 2) throw InvalidArgument("micro: need at least two vehicles");
  if (!(params.length > 0.0)) throw InvalidArgument("micro: vehicle length must be positive");
  if (!(params.reaction_time > 0.0)) throw InvalidArgument("micro: reaction time must be positive");
  if (!params.speed) throw InvalidArgument("micro: missing speed law");
  double previous = params.speed(0.0);
  for (int k = 1; k <= 100; ++k) {
    const double value = params.speed(k / 100.0);
    if (value > previous + 1e-12) throw InvalidArgument("micro: speed law must be nonincreasing");
    previous = value;
  }
}

MicroState make_micro_state(int vehicles, const std::function<double(int, double)>& position,
                            const Basis& basis) {
  MicroState state;
  state.positions.resize(vehicles, basis.size());
  for (int i = 0; i < vehicles; ++i) {
    state.positions.row(i) =
        project_function([&](double xi) { return position(i, xi); }, basis).transpose();
  }
  return state;
}

MicroState make_platoon(int vehicles, double leader_position, double headway, double noise,
                        const Basis& basis) {
  return make_micro_state(
      vehicles,
      [&](int i, double xi) {
        return leader_position - (vehicles - 1 - i) * (headway + noise * xi);
      },
      basis);
}

Matrix headway_speeds(const Matrix& positions, const MicroParams& params, const Basis& basis) {
  NodalHeadways grid = nodal_headways(positions, params.perception_noise, basis);
  Matrix& values = grid.values;
  for (Eigen::Index q = 0; q < values.cols(); ++q) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double headway = values(i, q);
      check_headway(headway, i, grid.nodes[static_cast<std::size_t>(q)]);
      values(i, q) = params.speed(params.length / headway);
    }
  }
  return project_rows(values, grid);
}

GalerkinVector project_headway_speed(int vehicle, const Matrix& positions,
                                     const MicroParams& params, const Basis& basis) {
  if (vehicle < 0 || vehicle + 1 >= positions.rows()) {
    throw InvalidArgument("project_headway_speed: vehicle has no leader");
  }
  return headway_speeds(positions.middleRows(vehicle, 2), params, basis).row(0).transpose();
}

Matrix micro_rhs_first_order(const MicroState& state, const MicroParams& params,
                             const Basis& basis) {
  const Eigen::Index n = state.positions.rows();
  Matrix rate = Matrix::Zero(n, basis.size());
  rate.topRows(n - 1) = headway_speeds(state.positions, params, basis);
  rate(n - 1, 0) = params.leader_speed;
  return rate;
}

MicroDerivative micro_rhs_second_order(const MicroState& state, const MicroParams& params,
                                       const TripleProductTensor& tensor) {
  const Basis& basis = tensor.basis();
  const Eigen::Index n = state.positions.rows();
  if (state.velocities.rows() != n || state.velocities.cols() != basis.size()) {
    throw InvalidArgument("micro_rhs_second_order: velocity coefficients missing");
  }
  MicroDerivative d;
  d.positions = state.velocities;
  d.velocities = Matrix::Zero(n, basis.size());
  const Matrix speeds = headway_speeds(state.positions, params, basis);
  const double relax = params.A / params.reaction_time;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const GalerkinVector gap = (state.positions.row(i + 1) - state.positions.row(i)).transpose();
    const GalerkinVector dv = (state.velocities.row(i + 1) - state.velocities.row(i)).transpose();
    // P^{-2}(gap) dv as two solves
    const GalerkinVector once = galerkin_solve(gap, dv, tensor);
    const GalerkinVector twice = galerkin_solve(gap, once, tensor);
    d.velocities.row(i) =
        (params.C * twice + relax * (speeds.row(i) - state.velocities.row(i)).transpose())
            .transpose();
  }
  d.velocities(n - 1, 0) = params.leader_accel;
  return d;
}

std::vector<MicroState> integrate_micro(const MicroState& initial, const MicroParams& params,
                                        const TripleProductTensor& tensor,
                                        const MicroRunOptions& options) {
  validate(params);
  if (!(options.dt > 0.0)) throw InvalidArgument("integrate_micro: dt must be positive");
  if (!(options.final_time >= 0.0)) throw InvalidArgument("integrate_micro: negative final time");
  const Basis& basis = tensor.basis();
  const bool second = options.order == MicroOrder::second;
  MicroState state = initial;
  if (state.positions.cols() != basis.size()) {
    throw InvalidArgument("integrate_micro: position coefficients do not match the basis");
  }
  if (second && state.velocities.size() == 0) {
    throw InvalidArgument("integrate_micro: second-order run needs initial velocities");
  }
  if (!second) state.velocities.resize(0, 0);
  check_ordering(state);

  std::vector<MicroState> snapshots{state};
  double next_output = options.snapshot_interval > 0.0 ? options.snapshot_interval : options.final_time;

  auto advance = [&](const MicroState& s, double h) {
    MicroState out = s;
    if (!second) {
      const Matrix k1 = micro_rhs_first_order(s, params, basis);
      MicroState tmp = s;
      tmp.positions = s.positions + 0.5 * h * k1;
      const Matrix k2 = micro_rhs_first_order(tmp, params, basis);
      tmp.positions = s.positions + 0.5 * h * k2;
      const Matrix k3 = micro_rhs_first_order(tmp, params, basis);
      tmp.positions = s.positions + h * k3;
      const Matrix k4 = micro_rhs_first_order(tmp, params, basis);
      out.positions = s.positions + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      const MicroDerivative k1 = micro_rhs_second_order(s, params, tensor);
      MicroState tmp = s;
      tmp.positions = s.positions + 0.5 * h * k1.positions;
      tmp.velocities = s.velocities + 0.5 * h * k1.velocities;
      const MicroDerivative k2 = micro_rhs_second_order(tmp, params, tensor);
      tmp.positions = s.positions + 0.5 * h * k2.positions;
      tmp.velocities = s.velocities + 0.5 * h * k2.velocities;
      const MicroDerivative k3 = micro_rhs_second_order(tmp, params, tensor);
      tmp.positions = s.positions + h * k3.positions;
      tmp.velocities = s.velocities + h * k3.velocities;
      const MicroDerivative k4 = micro_rhs_second_order(tmp, params, tensor);
      out.positions = s.positions + (h / 6.0) * (k1.positions + 2.0 * k2.positions +
                                                 2.0 * k3.positions + k4.positions);
      out.velocities = s.velocities + (h / 6.0) * (k1.velocities + 2.0 * k2.velocities +
                                                   2.0 * k3.velocities + k4.velocities);
    }
    out.time = s.time + h;
    return out;
  };

  const double eps = 1e-12 * std::max(1.0, options.final_time);
  std::size_t step = 0;
  while (state.time < options.final_time - eps) {
    ++step;
    // fixed grid t_n = n dt avoids accumulating round-off in the clock
    const double target = std::min(static_cast<double>(step) * options.dt, options.final_time);
    state = advance(state, target - state.time);
    state.time = target;
    check_ordering(state);
    if (state.time >= next_output - eps || state.time >= options.final_time - eps) {
      snapshots.push_back(state);
      while (next_output <= state.time + eps) {
        next_output += options.snapshot_interval > 0.0 ? options.snapshot_interval : options.final_time;
      }
    }
  }
  if (snapshots.back().time != state.time) snapshots.push_back(state);
  return snapshots;
}

Matrix reconstruct_local_density(const MicroState& state, const MicroParams& params,
                                 const Basis& basis) {
  NodalHeadways grid = nodal_headways(state.positions, 0.0, basis);
  Matrix& values = grid.values;
  for (Eigen::Index q = 0; q < values.cols(); ++q) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      check_headway(values(i, q), i, grid.nodes[static_cast<std::size_t>(q)]);
      values(i, q) = params.length / values(i, q);
    }
  }
  return project_rows(values, grid);
}

}  // namespace sgtraffic
