// Monte Carlo oracle: estimator properties, reproducibility, comparison.

#include <cmath>
#include <memory>

#include "doctest.h"
#include "sgtraffic/mc_oracle.hpp"

using namespace sgtraffic;

namespace {

std::vector<Vector> identity_sample(double xi) { return {Vector::Constant(1, xi)}; }

MacroRunConfig small_config() {
  MacroRunConfig cfg;
  cfg.grid.cells = 50;
  cfg.grid.final_time = 0.5;
  cfg.output_times = {0.25};
  return cfg;
}

}  // namespace

TEST_CASE("deterministic sample function has zero variance") {
  const MomentSeries s = estimate_moments([](double) { return std::vector<Vector>{Vector::Constant(3, 0.4)}; }, 50, 1);
  CHECK(s.snapshots[0].variance.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.snapshots[0].mean.isApproxToConstant(0.4, 1e-15));
}

TEST_CASE("estimates of U(0,1) moments and unbiased variance") {
  const MomentSeries s = estimate_moments(identity_sample, 20000, 5);
  CHECK(s.snapshots[0].mean[0] == doctest::Approx(0.5).epsilon(0.02));
  CHECK(s.snapshots[0].variance[0] == doctest::Approx(1.0 / 12.0).epsilon(0.03));
  // unbiased estimator by hand
  double m = 0.0;
  for (double x : s.xi) m += x;
  m /= s.xi.size();
  double v = 0.0;
  for (double x : s.xi) v += (x - m) * (x - m);
  v /= (s.xi.size() - 1);
  CHECK(s.snapshots[0].variance[0] == doctest::Approx(v).epsilon(1e-10));
}

TEST_CASE("standard error halves when M quadruples") {
  double ratio_sum = 0.0;
  constexpr int reps = 10;
  for (int r = 0; r < reps; ++r) {
    const double se1 = estimate_moments(identity_sample, 1000, 100 + r).snapshots[0].standard_error[0];
    const double se4 = estimate_moments(identity_sample, 4000, 200 + r).snapshots[0].standard_error[0];
    ratio_sum += se4 / se1;
  }
  CHECK(ratio_sum / reps == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("seeded reproducibility and worker-count independence") {
  auto sample = [](double xi) { return std::vector<Vector>{Vector::LinSpaced(7, xi, 2 * xi).array().sin().matrix()}; };
  const MomentSeries a = estimate_moments(sample, 333, 42, 1);
  const MomentSeries b = estimate_moments(sample, 333, 42, 3);
  const MomentSeries c = estimate_moments(sample, 333, 43, 1);
  CHECK(a.xi == b.xi);
  CHECK(a.snapshots[0].mean == b.snapshots[0].mean);
  CHECK(a.snapshots[0].variance == b.snapshots[0].variance);
  CHECK(a.xi != c.xi);
}

TEST_CASE("sample failures name the sample and xi") {
  try {
    estimate_moments([](double xi) -> std::vector<Vector> {
      if (xi > 0.5) throw NumericalError("boom");
      return {Vector::Zero(1)};
    }, 100, 3);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("xi") != std::string::npos);
  }
}

TEST_CASE("mc_solve: deterministic input gives zero variance") {
  const MCRun run = mc_solve(small_config(), RiemannData{0.8, 0.8, 0.2, 1.0}, 40, 7);
  REQUIRE(run.estimates.size() == 3);
  for (const MomentEstimate& e : run.estimates) CHECK(e.variance.cwiseAbs().maxCoeff() <= 1e-28);
}

TEST_CASE("compare: identical deterministic problem agrees to 1e-10") {
  const MacroRunConfig cfg = small_config();
  const RiemannData data{0.8, 0.8, 0.2, 1.0};
  const auto basis = std::make_shared<const Basis>(build_basis({BasisFamily::haar, 7, 0}));
  const TripleProductTensor t = compute_triple_tensor(basis);
  const MacroRun sg = run_macro(init_riemann(cfg.grid, cfg.spec, *basis, data), cfg, t);
  const CompareReport r = compare(sg.snapshots, mc_solve(cfg, data, 20, 1), 5e-3);
  CHECK(r.passed);
  for (const CompareSnapshot& s : r.snapshots) CHECK(s.l1_mean <= 1e-10);
}

TEST_CASE("compare: stochastic problem passes, mutated flux fails") {
  const MacroRunConfig cfg = small_config();
  const RiemannData data{};
  const auto basis = std::make_shared<const Basis>(build_basis({BasisFamily::haar, 7, 0}));
  const TripleProductTensor t = compute_triple_tensor(basis);
  const MCRun mc = mc_solve(cfg, data, 300, 11, 2);

  auto sg_snapshots = [&](const MacroRunConfig& c) {
    return run_macro(init_riemann(c.grid, c.spec, *basis, data), c, t).snapshots;
  };
  const CompareReport good = compare(sg_snapshots(cfg), mc);
  CHECK(good.passed);

  MacroRunConfig mutated = cfg;
  mutated.spec.v_eq = ScalarLaw::make_affine(1.0, -0.5, "mutated");
  const CompareReport bad = compare(sg_snapshots(mutated), mc);
  CHECK_FALSE(bad.passed);

  MacroRunConfig other = cfg;
  other.grid.cells = 60;
  CHECK_THROWS_AS(compare(sg_snapshots(other), mc), InvalidArgument);
}
