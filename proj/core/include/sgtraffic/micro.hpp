#pragma once

// Stochastic Galerkin follow-the-leader dynamics. Vehicle i = 0..N-1 follows
// vehicle i+1; vehicle N-1 is the leader.

#include <functional>
#include <vector>

#include "sgtraffic/chaos.hpp"

namespace sgtraffic {

/// Default optimal-velocity law s(y) = 1 - y clamped to [0,1], where
/// y = L / headway is the local density seen by the driver.
double greenshields_speed(double local_density);

struct MicroParams {
  int vehicles = 2;
  double length = 0.5;  ///< L
  std::function<double(double)> speed = greenshields_speed;
  double leader_speed = 1.0;  ///< first-order leader velocity
  double leader_accel = 0.0;  ///< second-order leader acceleration
  double C = 1.0;
  double A = 1.0;
  double reaction_time = 1.0;
  /// Amplitude of xi added to every headway evaluation. Zero keeps the
  /// uncertainty in the initial data only.
  double perception_noise = 0.0;
};

/// Throws InvalidArgument unless L > 0, t_r > 0, N >= 2 and s is nonincreasing on [0,1].
void validate(const MicroParams& params);

struct MicroState {
  Matrix positions;   ///< N x (K+1)
  Matrix velocities;  ///< N x (K+1); empty for first-order runs
  double time = 0.0;

  int vehicles() const { return static_cast<int>(positions.rows()); }
  bool second_order() const { return velocities.size() != 0; }
};

/// Projects positions x_i(xi) given pointwise by position(i, xi).
MicroState make_micro_state(int vehicles, const std::function<double(int, double)>& position,
                            const Basis& basis);

/// Platoon with leader at leader_position and initial headways
/// headway + noise * xi behind every car.
MicroState make_platoon(int vehicles, double leader_position, double headway, double noise,
                        const Basis& basis);

/// s-hat_i: projection of s(L / headway_i(xi)) with the headway reconstructed
/// from the position coefficients.
GalerkinVector project_headway_speed(int vehicle, const Matrix& positions,
                                     const MicroParams& params, const Basis& basis);

/// Speed coefficients of all followers, (N-1) x (K+1).
Matrix headway_speeds(const Matrix& positions, const MicroParams& params, const Basis& basis);

Matrix micro_rhs_first_order(const MicroState& state, const MicroParams& params,
                             const Basis& basis);

struct MicroDerivative {
  Matrix positions;
  Matrix velocities;
};

MicroDerivative micro_rhs_second_order(const MicroState& state, const MicroParams& params,
                                       const TripleProductTensor& tensor);

enum class MicroOrder { first = 1, second = 2 };

struct MicroRunOptions {
  double dt = 1e-3;
  double final_time = 1.0;
  double snapshot_interval = 0.0;  ///< 0 keeps only the initial and final states
  MicroOrder order = MicroOrder::first;
};

/// Classical RK4. Throws NumericalError when the mean positions stop being
/// strictly increasing or a headway vanishes in some scenario.
std::vector<MicroState> integrate_micro(const MicroState& initial, const MicroParams& params,
                                        const TripleProductTensor& tensor,
                                        const MicroRunOptions& options);

/// Stochastic local density rho_i = L / (x_{i+1} - x_i), (N-1) x (K+1).
Matrix reconstruct_local_density(const MicroState& state, const MicroParams& params,
                                 const Basis& basis);

}  // namespace sgtraffic
