#include "sgtraffic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgtraffic/parallel.hpp"

namespace sgtraffic {

double mean(const GalerkinVector& u) { return u.size() == 0 ? 0.0 : u[0]; }

double variance(const GalerkinVector& u) {
  return u.size() <= 1 ? 0.0 : u.tail(u.size() - 1).squaredNorm();
}

GalerkinVector fundamental_diagram(const GalerkinVector& rho, const TripleProductTensor& tensor,
                                   const ScalarLaw& v_eq) {
  return lwr_flux(rho, tensor, v_eq);
}

std::vector<FDPoint> fd_points(const MacroField& field, const MacroGrid& grid,
                               const TripleProductTensor& tensor, const ScalarLaw& v_eq,
                               int run_id, double rho_r) {
  std::vector<FDPoint> points;
  points.reserve(static_cast<std::size_t>(field.cells()));
  for (int j = 0; j < field.cells(); ++j) {
    const GalerkinVector rho = field.rho.row(j).transpose();
    const GalerkinVector flux = fundamental_diagram(rho, tensor, v_eq);
    points.push_back({run_id, rho_r, j, grid.center(j), field.time, mean(rho), variance(rho),
                      mean(flux), variance(flux)});
  }
  return points;
}

std::vector<FDBin> bin_fd_points(const std::vector<FDPoint>& points, double width,
                                 const ScalarLaw& v_eq) {
  if (!(width > 0.0)) throw InvalidArgument("bin_fd_points: bin width must be positive");
  const int count = static_cast<int>(std::ceil(1.0 / width - 1e-9));
  std::vector<FDBin> bins(static_cast<std::size_t>(count));
  std::vector<double> min_res(bins.size(), std::numeric_limits<double>::infinity());
  std::vector<double> max_res(bins.size(), -std::numeric_limits<double>::infinity());
  for (int b = 0; b < count; ++b) {
    auto& bin = bins[static_cast<std::size_t>(b)];
    bin.lo = b * width;
    bin.hi = std::min((b + 1) * width, 1.0);
    bin.min_flux = std::numeric_limits<double>::infinity();
    bin.max_flux = -std::numeric_limits<double>::infinity();
  }
  for (const FDPoint& p : points) {
    const int b = std::clamp(static_cast<int>(std::floor(p.mean_rho / width)), 0, count - 1);
    auto& bin = bins[static_cast<std::size_t>(b)];
    ++bin.count;
    bin.min_flux = std::min(bin.min_flux, p.mean_flux);
    bin.max_flux = std::max(bin.max_flux, p.mean_flux);
    const double residual = p.mean_flux - p.mean_rho * v_eq(p.mean_rho);
    min_res[static_cast<std::size_t>(b)] = std::min(min_res[static_cast<std::size_t>(b)], residual);
    max_res[static_cast<std::size_t>(b)] = std::max(max_res[static_cast<std::size_t>(b)], residual);
    bin.mean_var_rho += p.var_rho;
    bin.mean_var_flux += p.var_flux;
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    auto& bin = bins[b];
    if (bin.count == 0) {
      bin.min_flux = bin.max_flux = 0.0;
      continue;
    }
    bin.flux_spread = bin.max_flux - bin.min_flux;
    bin.residual_spread = max_res[b] - min_res[b];
    bin.mean_var_rho /= bin.count;
    bin.mean_var_flux /= bin.count;
  }
  return bins;
}

FDScan fd_scan(const FDScanConfig& config, const TripleProductTensor& tensor) {
  if (config.spec.model != MacroModel::lwr) throw InvalidArgument("fd_scan: needs the LWR model");
  const std::size_t runs = config.right_states.size();
  FDScan scan;
  scan.runs.resize(runs);
  std::vector<std::vector<FDPoint>> per_run(runs);
  MacroRunConfig run_config{config.grid, config.spec, {}};
  parallel_for(runs, config.workers, [&](std::size_t r) {
    RiemannData data = config.riemann;
    data.right = config.right_states[r];
    const MacroField initial = init_riemann(config.grid, config.spec, tensor.basis(), data);
    scan.runs[r] = run_macro(initial, run_config, tensor);
    per_run[r] = fd_points(scan.runs[r].snapshots.back(), config.grid, tensor, config.spec.v_eq,
                           static_cast<int>(r), data.right);
  });
  for (auto& points : per_run) scan.points.insert(scan.points.end(), points.begin(), points.end());
  scan.bins = bin_fd_points(scan.points, config.bin_width, config.spec.v_eq);
  return scan;
}

}  // namespace sgtraffic
