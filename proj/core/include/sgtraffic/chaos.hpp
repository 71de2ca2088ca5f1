#pragma once

// Generalized polynomial chaos on a single uniform random input xi ~ U(0,1):
// orthonormal bases, quadrature, the triple-product tensor and the Galerkin
// algebra built on it.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgtraffic/error.hpp"

namespace sgtraffic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coefficients u_0..u_K of one scalar random field at one point.
using GalerkinVector = Eigen::VectorXd;

enum class BasisFamily { haar, legendre };

std::string to_string(BasisFamily family);
BasisFamily parse_basis_family(const std::string& name);

struct BasisSpec {
  BasisFamily family = BasisFamily::haar;
  int order = 0;       ///< K; the basis has K+1 modes.
  int quadrature = 0;  ///< Q; 0 picks the family default.
};

/// Orthonormal basis on (0,1) with unit density.
///
/// Two quadratures are carried. The "fine" rule (Q nodes) integrates arbitrary
/// functions of xi, e.g. initial data. The "collocation" rule integrates
/// compositions g(u(xi)) with u in the span of the basis: for Haar those are
/// piecewise constant on the finest dyadic cells, so one midpoint per cell is
/// exact; for Legendre it coincides with the fine Gauss rule.
class Basis {
 public:
  explicit Basis(const BasisSpec& spec);

  const BasisSpec& spec() const { return spec_; }
  BasisFamily family() const { return spec_.family; }
  int order() const { return spec_.order; }
  int size() const { return spec_.order + 1; }

  /// phi_mode(xi) for xi in [0,1].
  double evaluate(int mode, double xi) const;

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  /// Q x (K+1) table of phi_k at the fine nodes.
  const Matrix& node_values() const { return node_values_; }

  std::span<const double> collocation_nodes() const { return colloc_nodes_; }
  std::span<const double> collocation_weights() const { return colloc_weights_; }
  const Matrix& collocation_values() const { return colloc_values_; }
  int collocation_size() const { return static_cast<int>(colloc_nodes_.size()); }

  /// Point values of sum_k u_k phi_k at the collocation nodes.
  Vector to_collocation(const GalerkinVector& u) const;
  /// Discrete projection of collocation-node values back onto the basis.
  GalerkinVector from_collocation(const Vector& values) const;

  /// Projects g(u(xi)) for u in the span (pseudo-spectral evaluation).
  template <class F>
  GalerkinVector compose(const GalerkinVector& u, F&& g) const {
    Vector values = to_collocation(u);
    for (Eigen::Index q = 0; q < values.size(); ++q) values[q] = g(values[q]);
    return from_collocation(values);
  }

 private:
  BasisSpec spec_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Matrix node_values_;
  std::vector<double> colloc_nodes_;
  std::vector<double> colloc_weights_;
  Matrix colloc_values_;
};

Basis build_basis(const BasisSpec& spec);

/// The matrices M_l, (M_l)_{ij} = E[phi_i phi_j phi_l], l = 0..K.
class TripleProductTensor {
 public:
  struct Entry {
    int i;
    int j;
    double value;
  };

  TripleProductTensor(std::shared_ptr<const Basis> basis, std::vector<Matrix> matrices);

  const Basis& basis() const { return *basis_; }
  std::shared_ptr<const Basis> basis_ptr() const { return basis_; }
  int size() const { return static_cast<int>(matrices_.size()); }
  const Matrix& operator[](int l) const { return matrices_[static_cast<std::size_t>(l)]; }

  /// Nonzero entries of M_k with i <= j.
  std::span<const Entry> upper_entries(int k) const { return upper_[static_cast<std::size_t>(k)]; }

 private:
  std::shared_ptr<const Basis> basis_;
  std::vector<Matrix> matrices_;
  std::vector<std::vector<Entry>> upper_;
};

TripleProductTensor compute_triple_tensor(std::shared_ptr<const Basis> basis);

/// P(u) = sum_l u_l M_l.
Matrix galerkin_matrix(const GalerkinVector& u, const TripleProductTensor& tensor);

/// u * z = P(u) z, evaluated so that u * z and z * u are bitwise equal.
GalerkinVector galerkin_product(const GalerkinVector& u, const GalerkinVector& z,
                                const TripleProductTensor& tensor);

/// Solves P(rho) y = z. Throws NumericalError when P(rho) is singular or its
/// condition estimate exceeds max_condition.
GalerkinVector galerkin_solve(const GalerkinVector& rho, const GalerkinVector& z,
                              const TripleProductTensor& tensor, double max_condition = 1e12);

/// Coefficients of f on the basis, using the fine quadrature.
GalerkinVector project_function(const std::function<double(double)>& f, const Basis& basis);

/// sum_k u_k phi_k(xi); xi must lie in [0,1].
double reconstruct(const GalerkinVector& u, double xi, const Basis& basis);

/// Greatest |sum_i w_i phi_i phi_j - delta_ij| under the fine quadrature.
double orthonormality_residual(const Basis& basis);

struct HyperbolicityReport {
  double a1_max_commutator = 0.0;
  double a2_max_commutator = 0.0;
  double a3_diagonalization_residual = 0.0;
  double tolerance = 1e-10;
  bool passed = false;
  std::string a1_detail;
  std::string a2_detail;
  std::string a3_detail;
};

struct HyperbolicityOptions {
  int samples = 100;
  std::uint64_t seed = 20220901;
  double tolerance = 1e-10;
};

/// Sampled certificate for the commuting / constant-eigenvector conditions
/// that keep the Galerkin ARZ system hyperbolic.
HyperbolicityReport check_hyperbolicity(const TripleProductTensor& tensor,
                                        const HyperbolicityOptions& options = {});

void require_size(const GalerkinVector& u, int expected, const char* what);

}  // namespace sgtraffic
