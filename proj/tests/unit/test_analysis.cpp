// Moments, stochastic fundamental diagram and fd-scan binning.

#include <cmath>
#include <memory>

#include "doctest.h"
#include "sgtraffic/analysis.hpp"
#include "sgtraffic/io.hpp"
#include "sgtraffic/random.hpp"

using namespace sgtraffic;

namespace {

std::shared_ptr<const Basis> haar(int K) {
  return std::make_shared<const Basis>(build_basis({BasisFamily::haar, K, 0}));
}

}  // namespace

TEST_CASE("mean and variance examples") {
  CHECK(mean(Vector{{0.85, -0.05, 0.0, 0.0}}) == 0.85);
  CHECK(mean(Vector{{0.3, 0.0}}) == 0.3);
  CHECK(variance(Vector{{0.5, 0.1, 0.2}}) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(variance(Vector{{0.7, 0.0, 0.0}}) == 0.0);
  const Vector u{{0.2, -0.4, 0.1, 0.3}};
  CHECK(variance(u) >= 0.0);
  CHECK(variance(u) == doctest::Approx(u.squaredNorm() - u[0] * u[0]));
}

TEST_CASE("variance of a projected linear field approaches 0.2^2 / 12") {
  double previous = 0.0;
  for (int K : {1, 3, 7, 15, 63}) {
    const double v = variance(project_function([](double xi) { return 0.75 + 0.2 * xi; }, *haar(K)));
    CHECK(v > previous);
    previous = v;
  }
  CHECK(previous == doctest::Approx(0.04 / 12.0).epsilon(1e-3));
}

TEST_CASE("fundamental_diagram equals lwr_flux") {
  const auto b = haar(7);
  const TripleProductTensor t = compute_triple_tensor(b);
  const Vector rho = project_function([](double xi) { return 0.4 + 0.3 * xi * xi; }, *b);
  CHECK((fundamental_diagram(rho, t) - lwr_flux(rho, t)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fundamental_diagram(Vector::Unit(8, 0) * 0.5, t)[0] == doctest::Approx(0.25));
}

TEST_CASE("fundamental-diagram moments agree with Monte Carlo of rho (1 - rho)") {
  const auto b = haar(15);
  const TripleProductTensor t = compute_triple_tensor(b);
  const Vector rho = project_function([](double xi) { return 0.75 + 0.2 * xi; }, *b);
  const Vector f = fundamental_diagram(rho, t);

  UniformSource source(99);
  constexpr int M = 1000;
  double sum = 0.0, sum2 = 0.0;
  for (int m = 0; m < M; ++m) {
    const double r = 0.75 + 0.2 * source.next();
    const double q = r * (1.0 - r);
    sum += q;
    sum2 += q * q;
  }
  const double mc_mean = sum / M;
  const double mc_var = (sum2 - M * mc_mean * mc_mean) / (M - 1);
  const double se_mean = std::sqrt(mc_var / M);
  // standard error of the sample variance for a bounded distribution, generous bound
  const double se_var = mc_var * std::sqrt(2.0 / (M - 1)) * 2.0;
  CHECK(std::abs(mean(f) - mc_mean) <= 3.0 * se_mean);
  CHECK(std::abs(variance(f) - mc_var) <= 3.0 * se_var);
}

TEST_CASE("binning: counts, spreads and residual spread") {
  std::vector<FDPoint> pts;
  auto add = [&](double r, double flux) {
    FDPoint p;
    p.mean_rho = r;
    p.mean_flux = flux;
    p.var_rho = 0.01;
    p.var_flux = 0.001;
    pts.push_back(p);
  };
  add(0.101, 0.101 * 0.899);
  add(0.109, 0.109 * 0.891);
  add(0.5, 0.25);
  add(0.51, 0.24);
  const std::vector<FDBin> bins = bin_fd_points(pts, 0.02);
  int total = 0;
  for (const FDBin& bin : bins) {
    total += bin.count;
    if (bin.lo <= 0.1 + 1e-12 && bin.hi > 0.1) {
      CHECK(bin.count == 2);
      CHECK(bin.residual_spread <= 1e-15);
      CHECK(bin.flux_spread > 0.0);
    }
    if (bin.lo <= 0.5 + 1e-12 && bin.hi > 0.51) {
      CHECK(bin.count == 2);
      CHECK(bin.residual_spread == doctest::Approx(std::abs((0.24 - 0.51 * 0.49) - 0.0)).epsilon(1e-12));
    }
  }
  CHECK(total == 4);
}

TEST_CASE("small fd_scan: free flow stays on the parabola and output is deterministic") {
  const auto b = haar(7);
  const TripleProductTensor t = compute_triple_tensor(b);
  FDScanConfig cfg;
  cfg.grid.cells = 80;
  cfg.right_states = {0.1, 0.5, 0.9};
  cfg.workers = 2;
  const FDScan scan = fd_scan(cfg, t);
  CHECK(scan.points.size() == 240);
  CHECK(scan.runs.size() == 3);
  for (const FDBin& bin : scan.bins) {
    if (bin.hi <= 0.3 && bin.count > 0) CHECK(bin.residual_spread <= 1e-6);
  }
  cfg.workers = 1;
  const FDScan again = fd_scan(cfg, t);
  CHECK(fd_points_csv(scan.points) == fd_points_csv(again.points));
  CHECK(fd_bins_csv(scan.bins) == fd_bins_csv(again.bins));
}
