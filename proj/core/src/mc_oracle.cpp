#include "sgtraffic/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "sgtraffic/analysis.hpp"
#include "sgtraffic/parallel.hpp"
#include "sgtraffic/random.hpp"

namespace sgtraffic {

MomentSeries estimate_moments(const std::function<std::vector<Vector>(double)>& sample, int samples,
                              std::uint64_t seed, int workers) {
  if (samples < 2) throw InvalidArgument("estimate_moments: need at least two samples");
  MomentSeries out;
  UniformSource rng(seed);
  out.xi.resize(static_cast<std::size_t>(samples));
  for (double& xi : out.xi) xi = rng.next();

  std::vector<std::vector<Vector>> values(out.xi.size());
  parallel_for(out.xi.size(), workers, [&](std::size_t m) {
    try {
      values[m] = sample(out.xi[m]);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("sample {} (xi={:.17g}): {}", m, out.xi[m], e.what()));
    }
  });

  const std::size_t snapshots = values.front().size();
  std::vector<double> column(out.xi.size());
  for (std::size_t s = 0; s < snapshots; ++s) {
    const Eigen::Index n = values.front()[s].size();
    MomentEstimate est{Vector(n), Vector(n), Vector(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::size_t m = 0; m < values.size(); ++m) column[m] = values[m][s][i];
      const double mu = pairwise_sum(column) / samples;
      for (double& v : column) v = (v - mu) * (v - mu);
      const double var = pairwise_sum(column) / (samples - 1);
      est.mean[i] = mu;
      est.variance[i] = var;
      est.standard_error[i] = std::sqrt(var / samples);
    }
    out.snapshots.push_back(std::move(est));
  }
  return out;
}

MCRun mc_solve(const MacroRunConfig& config, const RiemannData& data, int samples,
               std::uint64_t seed, int workers) {
  auto basis = std::make_shared<const Basis>(BasisSpec{BasisFamily::haar, 0, 1});
  const TripleProductTensor tensor = compute_triple_tensor(basis);

  MCRun run;
  run.model = to_string(config.spec.model);
  run.samples = samples;
  run.seed = seed;
  run.a = config.grid.a;
  run.b = config.grid.b;
  run.cells = config.grid.cells;

  auto sample = [&](double xi) {
    RiemannData fixed = data;
    const double left = data.left_min + (data.left_max - data.left_min) * xi;
    fixed.left_min = fixed.left_max = left;
    const MacroField initial = init_riemann(config.grid, config.spec, *basis, fixed);
    const MacroRun result = run_macro(initial, config, tensor);
    std::vector<Vector> out;
    out.reserve(result.snapshots.size());
    for (const MacroField& f : result.snapshots) out.push_back(f.rho.col(0));
    return out;
  };
  MomentSeries series = estimate_moments(sample, samples, seed, workers);

  run.times = macro_output_times(config);
  run.estimates = std::move(series.snapshots);
  run.xi = std::move(series.xi);
  return run;
}

CompareReport compare(const std::vector<MacroField>& sg_snapshots, const MCRun& mc, double atol) {
  CompareReport report;
  report.atol = atol;
  report.passed = true;
  if (mc.estimates.size() != mc.times.size()) throw InvalidArgument("compare: malformed MC run");
  const double length = mc.b - mc.a;
  const double dx = length / mc.cells;
  for (std::size_t s = 0; s < mc.times.size(); ++s) {
    const auto match = std::find_if(sg_snapshots.begin(), sg_snapshots.end(), [&](const MacroField& f) {
      return std::abs(f.time - mc.times[s]) <= 1e-12 * std::max(1.0, mc.times[s]);
    });
    if (match == sg_snapshots.end()) {
      throw InvalidArgument(fmt::format("compare: no SG snapshot at t={}", mc.times[s]));
    }
    if (match->cells() != mc.cells) throw InvalidArgument("compare: grid mismatch");
    const MomentEstimate& est = mc.estimates[s];
    CompareSnapshot snap;
    snap.time = mc.times[s];
    for (int j = 0; j < mc.cells; ++j) {
      const GalerkinVector rho = match->rho.row(j).transpose();
      const double d = std::abs(mean(rho) - est.mean[j]);
      snap.l1_mean += d * dx;
      snap.linf_mean = std::max(snap.linf_mean, d);
      snap.l1_variance += std::abs(variance(rho) - est.variance[j]) * dx;
      snap.l1_standard_error += est.standard_error[j] * dx;
    }
    snap.l1_mean /= length;
    snap.l1_variance /= length;
    snap.l1_standard_error /= length;
    snap.threshold = std::max(3.0 * snap.l1_standard_error, atol);
    snap.passed = snap.l1_mean <= snap.threshold;
    report.passed = report.passed && snap.passed;
    report.snapshots.push_back(snap);
  }
  return report;
}

}  // namespace sgtraffic
