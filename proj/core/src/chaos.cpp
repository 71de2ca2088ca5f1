#include "sgtraffic/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "sgtraffic/random.hpp"

namespace sgtraffic {
namespace {

// Tensor entries below this are quadrature round-off of exact zeros.
constexpr double kTensorZero = 1e-14;

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

// Number of wavelet levels J+1 in a Haar basis with n = K+1 modes.
int haar_levels(int n) { return std::bit_width(static_cast<unsigned>(n)) - 1; }

double haar_value(int mode, double xi) {
  if (mode == 0) return 1.0;
  const int level = std::bit_width(static_cast<unsigned>(mode)) - 1;
  const int shift = mode - (1 << level);
  const double scale = static_cast<double>(1 << level);
  // the right end point belongs to the last dyadic cell
  const double x = std::min(xi, std::nextafter(1.0, 0.0)) * scale - shift;
  if (x < 0.0 || x >= 1.0) return 0.0;
  const double amplitude = std::sqrt(scale);
  return x < 0.5 ? amplitude : -amplitude;
}

// Shifted Legendre polynomial P_n(2 xi - 1), scaled to unit norm on (0,1).
double legendre_value(int mode, double xi) {
  const double t = 2.0 * xi - 1.0;
  double p_prev = 1.0;
  double p = t;
  if (mode == 0) return 1.0;
  for (int n = 1; n < mode; ++n) {
    const double next = ((2.0 * n + 1.0) * t * p - n * p_prev) / (n + 1.0);
    p_prev = p;
    p = next;
  }
  return std::sqrt(2.0 * mode + 1.0) * p;
}

// Gauss-Legendre rule on (0,1), Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = t;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    // recompute the derivative at the converged root
    double p0 = 1.0;
    double p1 = t;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    // map [-1,1] -> [0,1]; store ascending
    nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (t + 1.0);
    weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
}

void midpoint_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(static_cast<std::size_t>(n));
  weights.assign(static_cast<std::size_t>(n), 1.0 / n);
  for (int q = 0; q < n; ++q) nodes[static_cast<std::size_t>(q)] = (q + 0.5) / n;
}

Matrix tabulate(const Basis& basis, std::span<const double> nodes) {
  Matrix values(static_cast<Eigen::Index>(nodes.size()), basis.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    for (int k = 0; k < basis.size(); ++k) {
      values(static_cast<Eigen::Index>(q), k) = basis.evaluate(k, nodes[q]);
    }
  }
  return values;
}

double max_commutator(const Matrix& a, const Matrix& b) { return (a * b - b * a).norm(); }

}  // namespace

std::string to_string(BasisFamily family) {
  return family == BasisFamily::haar ? "haar" : "legendre";
}

BasisFamily parse_basis_family(const std::string& name) {
  if (name == "haar") return BasisFamily::haar;
  if (name == "legendre") return BasisFamily::legendre;
  throw InvalidArgument("unsupported basis family '" + name + "'");
}

Basis::Basis(const BasisSpec& spec) : spec_(spec) {
  if (spec.order < 0) throw InvalidArgument("basis order K must be nonnegative");
  if (spec.quadrature < 0) throw InvalidArgument("quadrature resolution must be nonnegative");
  const int n = spec.order + 1;
  switch (spec.family) {
    case BasisFamily::haar: {
      if (!is_power_of_two(n)) {
        throw InvalidArgument(fmt::format(
            "haar basis needs K+1 to be a power of two (complete dyadic levels), got K={}",
            spec.order));
      }
      // finest wavelet level J = levels-1; default Q = 2^(J+4)
      const int finest = std::max(haar_levels(n) - 1, 0);
      const int default_q = 1 << (finest + 4);
      if (spec_.quadrature == 0) spec_.quadrature = default_q;
      if (!is_power_of_two(spec_.quadrature) || spec_.quadrature < n) {
        throw InvalidArgument(fmt::format(
            "haar quadrature must be a power of two no smaller than K+1={}, got {}", n,
            spec_.quadrature));
      }
      midpoint_rule(spec_.quadrature, nodes_, weights_);
      midpoint_rule(n, colloc_nodes_, colloc_weights_);
      break;
    }
    case BasisFamily::legendre: {
      if (spec_.quadrature == 0) spec_.quadrature = 4 * n;
      if (spec_.quadrature < n + 1) {
        throw InvalidArgument("legendre quadrature must have more than K+1 nodes");
      }
      gauss_legendre(spec_.quadrature, nodes_, weights_);
      colloc_nodes_ = nodes_;
      colloc_weights_ = weights_;
      break;
    }
    default:
      throw InvalidArgument("unsupported basis family");
  }
  node_values_ = tabulate(*this, nodes_);
  colloc_values_ = tabulate(*this, colloc_nodes_);
}

double Basis::evaluate(int mode, double xi) const {
  if (mode < 0 || mode > spec_.order) {
    throw InvalidArgument(fmt::format("mode {} outside 0..{}", mode, spec_.order));
  }
  return spec_.family == BasisFamily::haar ? haar_value(mode, xi) : legendre_value(mode, xi);
}

Vector Basis::to_collocation(const GalerkinVector& u) const {
  require_size(u, size(), "to_collocation");
  return colloc_values_ * u;
}

GalerkinVector Basis::from_collocation(const Vector& values) const {
  if (values.size() != collocation_size()) {
    throw InvalidArgument("from_collocation: value count does not match collocation nodes");
  }
  const Eigen::Map<const Vector> w(colloc_weights_.data(), collocation_size());
  return colloc_values_.transpose() * values.cwiseProduct(w);
}

Basis build_basis(const BasisSpec& spec) { return Basis(spec); }

TripleProductTensor::TripleProductTensor(std::shared_ptr<const Basis> basis,
                                         std::vector<Matrix> matrices)
    : basis_(std::move(basis)), matrices_(std::move(matrices)) {
  if (!basis_) throw InvalidArgument("triple tensor needs a basis");
  const int n = basis_->size();
  if (static_cast<int>(matrices_.size()) != n) {
    throw InvalidArgument("triple tensor needs K+1 matrices");
  }
  upper_.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Matrix& m = matrices_[static_cast<std::size_t>(k)];
    if (m.rows() != n || m.cols() != n) throw InvalidArgument("triple tensor matrix size");
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (m(i, j) != 0.0) upper_[static_cast<std::size_t>(k)].push_back({i, j, m(i, j)});
      }
    }
  }
}

TripleProductTensor compute_triple_tensor(std::shared_ptr<const Basis> basis) {
  if (!basis) throw InvalidArgument("compute_triple_tensor: null basis");
  const int n = basis->size();
  const Matrix& phi = basis->node_values();
  const auto w = basis->weights();
  std::vector<Matrix> matrices(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (int l = 0; l < n; ++l) {
    Matrix& m = matrices[static_cast<std::size_t>(l)];
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double sum = 0.0;
        for (Eigen::Index q = 0; q < phi.rows(); ++q) {
          sum += w[static_cast<std::size_t>(q)] * phi(q, i) * phi(q, j) * phi(q, l);
        }
        if (std::abs(sum) < kTensorZero) sum = 0.0;
        m(i, j) = sum;
        m(j, i) = sum;
      }
    }
  }
  return TripleProductTensor(std::move(basis), std::move(matrices));
}

void require_size(const GalerkinVector& u, int expected, const char* what) {
  if (u.size() != expected) {
    throw InvalidArgument(
        fmt::format("{}: expected {} coefficients, got {}", what, expected, u.size()));
  }
}

Matrix galerkin_matrix(const GalerkinVector& u, const TripleProductTensor& tensor) {
  const int n = tensor.size();
  require_size(u, n, "galerkin_matrix");
  Matrix p = Matrix::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    if (u[l] != 0.0) p.noalias() += u[l] * tensor[l];
  }
  return p;
}

GalerkinVector galerkin_product(const GalerkinVector& u, const GalerkinVector& z,
                                const TripleProductTensor& tensor) {
  const int n = tensor.size();
  require_size(u, n, "galerkin_product");
  require_size(z, n, "galerkin_product");
  GalerkinVector out = GalerkinVector::Zero(n);
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    for (const auto& e : tensor.upper_entries(k)) {
      // symmetric pairing keeps u*z and z*u bitwise identical
      const double pair = e.i == e.j ? u[e.i] * z[e.j] : u[e.i] * z[e.j] + u[e.j] * z[e.i];
      sum += e.value * pair;
    }
    out[k] = sum;
  }
  return out;
}

GalerkinVector galerkin_solve(const GalerkinVector& rho, const GalerkinVector& z,
                              const TripleProductTensor& tensor, double max_condition) {
  const int n = tensor.size();
  require_size(rho, n, "galerkin_solve");
  require_size(z, n, "galerkin_solve");
  const Matrix p = galerkin_matrix(rho, tensor);
  if (n == 1) {
    if (p(0, 0) == 0.0) throw NumericalError("galerkin_solve: singular Galerkin matrix");
    return z / p(0, 0);
  }
  Eigen::PartialPivLU<Matrix> lu(p);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > max_condition) {
    throw NumericalError(fmt::format(
        "galerkin_solve: singular or near-singular Galerkin matrix (rcond={:.3e})", rcond));
  }
  GalerkinVector y = lu.solve(z);
  const double residual = (p * y - z).norm();
  if (!(residual <= 1e-10 * z.norm())) {
    throw NumericalError(fmt::format("galerkin_solve: residual {:.3e} too large", residual));
  }
  return y;
}

GalerkinVector project_function(const std::function<double(double)>& f, const Basis& basis) {
  const auto nodes = basis.nodes();
  const auto w = basis.weights();
  const Matrix& phi = basis.node_values();
  GalerkinVector out = GalerkinVector::Zero(basis.size());
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double value = f(nodes[q]);
    if (!std::isfinite(value)) {
      throw InvalidArgument(fmt::format("project_function: f({}) is not finite", nodes[q]));
    }
    out.noalias() += (w[q] * value) * phi.row(static_cast<Eigen::Index>(q)).transpose();
  }
  return out;
}

double reconstruct(const GalerkinVector& u, double xi, const Basis& basis) {
  require_size(u, basis.size(), "reconstruct");
  if (!(xi >= 0.0 && xi <= 1.0)) {
    throw InvalidArgument(fmt::format("reconstruct: xi={} outside [0,1]", xi));
  }
  double sum = 0.0;
  for (int k = 0; k < basis.size(); ++k) sum += u[k] * basis.evaluate(k, xi);
  return sum;
}

double orthonormality_residual(const Basis& basis) {
  const Matrix& phi = basis.node_values();
  const Eigen::Map<const Vector> w(basis.weights().data(), phi.rows());
  const Matrix gram = phi.transpose() * w.asDiagonal() * phi;
  return (gram - Matrix::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff();
}

HyperbolicityReport check_hyperbolicity(const TripleProductTensor& tensor,
                                        const HyperbolicityOptions& options) {
  HyperbolicityReport report;
  report.tolerance = options.tolerance;
  const int n = tensor.size();

  int worst_l = 0;
  int worst_k = 0;
  for (int l = 0; l < n; ++l) {
    for (int k = l + 1; k < n; ++k) {
      const double c = max_commutator(tensor[l], tensor[k]);
      if (c > report.a1_max_commutator) {
        report.a1_max_commutator = c;
        worst_l = l;
        worst_k = k;
      }
    }
  }
  report.a1_detail = fmt::format("max ||M_l M_k - M_k M_l||_F = {:.3e} at (l,k)=({},{})",
                                 report.a1_max_commutator, worst_l, worst_k);

  UniformSource rng(options.seed);
  auto random_vector = [&] {
    GalerkinVector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.next(-1.0, 1.0);
    return v;
  };
  std::vector<Matrix> sampled;
  sampled.reserve(static_cast<std::size_t>(2 * options.samples));
  for (int s = 0; s < options.samples; ++s) {
    const Matrix pu = galerkin_matrix(random_vector(), tensor);
    const Matrix pz = galerkin_matrix(random_vector(), tensor);
    report.a2_max_commutator = std::max(report.a2_max_commutator, max_commutator(pu, pz));
    sampled.push_back(pu);
    sampled.push_back(pz);
  }
  report.a2_detail = fmt::format("max ||P(u)P(z) - P(z)P(u)||_F = {:.3e} over {} pairs",
                                 report.a2_max_commutator, options.samples);

  // Constant eigenvectors: fit V from one P(r) with a simple spectrum.
  Matrix v = Matrix::Identity(n, n);
  bool fitted = n == 1;
  for (int attempt = 0; attempt < 50 && !fitted; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(galerkin_matrix(random_vector(), tensor));
    const Vector& lambda = eig.eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i) gap = std::min(gap, lambda[i] - lambda[i - 1]);
    if (gap > 1e-6) {
      v = eig.eigenvectors();
      fitted = true;
    }
  }
  if (!fitted) {
    report.a3_diagonalization_residual = std::numeric_limits<double>::infinity();
    report.a3_detail = "no sampled P(r) with distinct eigenvalues";
  } else {
    for (const Matrix& p : sampled) {
      Matrix d = v.transpose() * p * v;
      d.diagonal().setZero();
      report.a3_diagonalization_residual = std::max(report.a3_diagonalization_residual, d.norm());
    }
    report.a3_detail = fmt::format("max ||V^T P(u) V - diag||_F = {:.3e} over {} matrices",
                                   report.a3_diagonalization_residual, sampled.size());
  }

  report.passed = report.a1_max_commutator <= options.tolerance &&
                  report.a2_max_commutator <= options.tolerance &&
                  report.a3_diagonalization_residual <= options.tolerance;
  return report;
}

}  // namespace sgtraffic
