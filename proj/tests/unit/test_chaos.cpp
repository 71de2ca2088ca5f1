// Basis, triple tensor, Galerkin algebra and the hyperbolicity certificate.
// Oracles: hand-written Haar and shifted Legendre functions integrated by
// brute-force quadrature, independent of the library's own rules.

#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "sgtraffic/chaos.hpp"

using namespace sgtraffic;

namespace {

std::shared_ptr<const Basis> make(BasisFamily family, int order) {
  return std::make_shared<const Basis>(build_basis({family, order, 0}));
}

// Haar mode: 0 constant, then level j, shift k -> mode 2^j + k.
double haar_oracle(int mode, double xi) {
  if (mode == 0) return 1.0;
  int j = 0;
  while ((2 << j) <= mode) ++j;
  const int k = mode - (1 << j);
  const double scale = std::ldexp(1.0, -j);
  const double lo = k * scale;
  const double mid = lo + 0.5 * scale;
  const double hi = lo + scale;
  const double amp = std::sqrt(std::ldexp(1.0, j));
  if (xi >= lo && xi < mid) return amp;
  if (xi >= mid && xi < hi) return -amp;
  return 0.0;
}

double legendre_oracle(int n, double xi) {
  const double x = 2.0 * xi - 1.0;
  double p0 = 1.0, p1 = x;
  if (n == 0) return 1.0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(2.0 * n + 1.0) * p1;
}

Vector random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("haar K=0 is the constant mode") {
  const Basis b = build_basis({BasisFamily::haar, 0, 0});
  for (double xi : {0.0, 0.3, 0.99}) CHECK(b.evaluate(0, xi) == 1.0);
}

TEST_CASE("haar K=1 mother wavelet integrates to 0 and has unit norm") {
  const Basis b = build_basis({BasisFamily::haar, 1, 0});
  CHECK(b.evaluate(1, 0.25) == 1.0);
  CHECK(b.evaluate(1, 0.75) == -1.0);
  // exact piecewise integration: two halves of width 1/2
  const double integral = 0.5 * b.evaluate(1, 0.25) + 0.5 * b.evaluate(1, 0.75);
  const double norm = 0.5 * std::pow(b.evaluate(1, 0.25), 2) + 0.5 * std::pow(b.evaluate(1, 0.75), 2);
  CHECK(integral == 0.0);
  CHECK(norm == 1.0);
}

TEST_CASE("haar with incomplete dyadic level is rejected") {
  CHECK_THROWS_AS(build_basis({BasisFamily::haar, 2, 0}), InvalidArgument);
  CHECK_THROWS_AS(build_basis({BasisFamily::haar, 4, 0}), InvalidArgument);
  CHECK_THROWS_AS(build_basis({BasisFamily::haar, -1, 0}), InvalidArgument);
}

TEST_CASE("library haar functions match the oracle enumeration") {
  const Basis b = build_basis({BasisFamily::haar, 15, 0});
  for (int k = 0; k <= 15; ++k) {
    for (int q = 0; q < 64; ++q) {
      const double xi = (q + 0.5) / 64.0;
      CHECK(b.evaluate(k, xi) == doctest::Approx(haar_oracle(k, xi)).epsilon(1e-15));
    }
  }
}

TEST_CASE("orthonormality residual at most 1e-12") {
  for (int K : {0, 1, 3, 7, 15, 31}) CHECK(orthonormality_residual(build_basis({BasisFamily::haar, K, 0})) <= 1e-12);
  for (int K : {0, 1, 2, 3, 5, 8}) CHECK(orthonormality_residual(build_basis({BasisFamily::legendre, K, 0})) <= 1e-12);
}

TEST_CASE("triple tensor: haar K=0 and K=1 closed forms") {
  const TripleProductTensor t0 = compute_triple_tensor(make(BasisFamily::haar, 0));
  REQUIRE(t0.size() == 1);
  CHECK(t0[0](0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const TripleProductTensor t1 = compute_triple_tensor(make(BasisFamily::haar, 1));
  CHECK((t1[0] - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  Matrix m1(2, 2);
  m1 << 0, 1, 1, 0;
  CHECK((t1[1] - m1).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("triple tensor: M_0 identity and symmetry for every basis") {
  for (auto [family, K] : {std::pair{BasisFamily::haar, 15}, {BasisFamily::legendre, 4}}) {
    const TripleProductTensor t = compute_triple_tensor(make(family, K));
    const int n = K + 1;
    CHECK((t[0] - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-14);
    for (int l = 0; l < n; ++l) CHECK((t[l] - t[l].transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("haar K=15 tensor matches brute-force oracle to 1e-12") {
  const TripleProductTensor t = compute_triple_tensor(make(BasisFamily::haar, 15));
  constexpr int fine = 1 << 12;  // many midpoints per finest dyadic cell
  double worst = 0.0;
  for (int l = 0; l < 16; ++l) {
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        double sum = 0.0;
        for (int q = 0; q < fine; ++q) {
          const double xi = (q + 0.5) / fine;
          sum += haar_oracle(i, xi) * haar_oracle(j, xi) * haar_oracle(l, xi);
        }
        worst = std::max(worst, std::abs(sum / fine - t[l](i, j)));
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("legendre K=2 tensor matches composite Simpson oracle to 1e-10") {
  const TripleProductTensor t = compute_triple_tensor(make(BasisFamily::legendre, 2));
  constexpr int n = 2000;
  const double h = 1.0 / n;
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        auto f = [&](double x) { return legendre_oracle(i, x) * legendre_oracle(j, x) * legendre_oracle(l, x); };
        double s = f(0.0) + f(1.0);
        for (int q = 1; q < n; ++q) s += (q % 2 ? 4.0 : 2.0) * f(q * h);
        CHECK(std::abs(s * h / 3.0 - t[l](i, j)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("galerkin_matrix examples and linearity") {
  const TripleProductTensor t1 = compute_triple_tensor(make(BasisFamily::haar, 1));
  Matrix p = galerkin_matrix(Vector::Unit(2, 0) * 2.5, t1);
  CHECK((p - 2.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  Matrix expected(2, 2);
  expected << 1, 2, 2, 1;
  CHECK((galerkin_matrix(Vector{{1.0, 2.0}}, t1) - expected).cwiseAbs().maxCoeff() <= 1e-15);

  const TripleProductTensor t = compute_triple_tensor(make(BasisFamily::legendre, 3));
  std::mt19937_64 rng(7);
  const Vector u = random_vector(4, rng), z = random_vector(4, rng);
  CHECK((galerkin_matrix(u + z, t) - galerkin_matrix(u, t) - galerkin_matrix(z, t)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(galerkin_matrix(Vector::Zero(3), t), InvalidArgument);
}

TEST_CASE("galerkin_product examples") {
  const TripleProductTensor t1 = compute_triple_tensor(make(BasisFamily::haar, 1));
  const Vector r = galerkin_product(Vector{{1.0, 2.0}}, Vector{{3.0, 4.0}}, t1);
  CHECK(r[0] == doctest::Approx(11.0));
  CHECK(r[1] == doctest::Approx(10.0));

  const TripleProductTensor t = compute_triple_tensor(make(BasisFamily::haar, 7));
  std::mt19937_64 rng(3);
  const Vector z = random_vector(8, rng);
  CHECK((galerkin_product(Vector::Unit(8, 0), z, t) - z).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("galerkin product symmetric to 1e-14 over 1000 random pairs") {
  for (auto [family, K] : {std::pair{BasisFamily::haar, 15}, {BasisFamily::legendre, 5}}) {
    const TripleProductTensor t = compute_triple_tensor(make(family, K));
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const Vector u = random_vector(K + 1, rng), z = random_vector(K + 1, rng);
      worst = std::max(worst, (galerkin_product(u, z, t) - galerkin_product(z, u, t)).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("legendre K=3 product is not associative") {
  const TripleProductTensor t = compute_triple_tensor(make(BasisFamily::legendre, 3));
  std::mt19937_64 rng(5);
  double gap = 0.0;
  for (int s = 0; s < 20 && gap <= 1e-8; ++s) {
    const Vector u = random_vector(4, rng), z = random_vector(4, rng);
    const Vector left = galerkin_product(galerkin_product(u, u, t), z, t);
    const Vector right = galerkin_product(u, galerkin_product(u, z, t), t);
    gap = (left - right).cwiseAbs().maxCoeff();
  }
  CHECK(gap > 1e-8);
}

TEST_CASE("galerkin_solve examples and round trip") {
  const TripleProductTensor t1 = compute_triple_tensor(make(BasisFamily::haar, 1));
  const Vector y = galerkin_solve(Vector{{1.0, 0.5}}, Vector{{1.0, 0.0}}, t1);
  CHECK(y[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));

  const TripleProductTensor t = compute_triple_tensor(make(BasisFamily::haar, 15));
  std::mt19937_64 rng(9);
  const Vector z = random_vector(16, rng);
  CHECK((galerkin_solve(Vector::Unit(16, 0) * 0.5, z, t) - 2.0 * z).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(galerkin_solve(Vector::Zero(16), z, t), NumericalError);

  for (int s = 0; s < 50; ++s) {
    Vector rho = 0.1 * random_vector(16, rng);
    rho[0] = 1.0;
    const Vector sol = galerkin_solve(rho, z, t);
    CHECK((galerkin_matrix(rho, t) * sol - z).norm() <= 1e-10 * z.norm());
  }
}

TEST_CASE("project_function and reconstruct") {
  const Basis haar = build_basis({BasisFamily::haar, 3, 0});
  const Vector c = project_function([](double) { return 0.4; }, haar);
  CHECK(c[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(c.tail(3).cwiseAbs().maxCoeff() <= 1e-15);

  const Vector r = project_function([](double xi) { return 0.75 + 0.2 * xi; }, haar);
  CHECK(r[0] == doctest::Approx(0.85).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(-0.05).epsilon(1e-13));

  const Basis h1 = build_basis({BasisFamily::haar, 1, 0});
  CHECK(reconstruct(Vector{{0.85, -0.05}}, 0.25, h1) == doctest::Approx(0.80));
  CHECK(reconstruct(Vector{{0.3, 0.0}}, 0.9, h1) == doctest::Approx(0.3));
  CHECK_THROWS_AS(reconstruct(Vector{{0.3, 0.0}}, 1.5, h1), InvalidArgument);
  CHECK_THROWS_AS(project_function([](double) { return NAN; }, h1), InvalidArgument);

  // piecewise constant in span: reconstruct(project(f)) = f at cell midpoints
  const Basis h7 = build_basis({BasisFamily::haar, 7, 0});
  auto f = [](double xi) { return std::floor(8.0 * xi) * 0.1 - 0.2; };
  const Vector pf = project_function(f, h7);
  for (int q = 0; q < 8; ++q) {
    const double xi = (q + 0.5) / 8.0;
    CHECK(reconstruct(pf, xi, h7) == doctest::Approx(f(xi)).epsilon(1e-13));
  }
}

TEST_CASE("Parseval: truncated energy bounded by the full integral") {
  auto f = [](double xi) { return std::sin(3.0 * xi) + xi * xi; };
  const double full = 0.5 * (1.0 - std::sin(6.0) / 6.0) + 0.2
                      + 2.0 * ((2.0 - 9.0) * std::cos(3.0) / 27.0 + 6.0 * std::sin(3.0) / 27.0 - 2.0 / 27.0);
  double previous = 0.0;
  for (int K : {1, 3, 7, 15, 31}) {
    const Vector c = project_function(f, build_basis({BasisFamily::haar, K, 0}));
    const double energy = c.squaredNorm();
    CHECK(energy <= full + 1e-12);
    CHECK(energy >= previous - 1e-12);
    previous = energy;
  }
  CHECK(full - previous < 1e-3);
}

TEST_CASE("hyperbolicity verdicts") {
  const HyperbolicityReport haar = check_hyperbolicity(compute_triple_tensor(make(BasisFamily::haar, 15)));
  CHECK(haar.passed);
  CHECK(haar.a1_max_commutator <= 1e-10);
  CHECK(haar.a2_max_commutator <= 1e-10);
  CHECK(haar.a3_diagonalization_residual <= 1e-10);

  const HyperbolicityReport leg = check_hyperbolicity(compute_triple_tensor(make(BasisFamily::legendre, 3)));
  CHECK_FALSE(leg.passed);
  CHECK(leg.a1_max_commutator > 0.05);

  CHECK_FALSE(check_hyperbolicity(compute_triple_tensor(make(BasisFamily::legendre, 2))).passed);
  CHECK(check_hyperbolicity(compute_triple_tensor(make(BasisFamily::legendre, 0))).passed);
  CHECK(check_hyperbolicity(compute_triple_tensor(make(BasisFamily::haar, 0))).passed);
}
