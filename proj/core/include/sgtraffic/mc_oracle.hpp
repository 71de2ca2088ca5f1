#pragma once

// Non-intrusive Monte Carlo reference: run the deterministic (K = 0) solver
// once per sample of xi and estimate pointwise moments.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgtraffic/chaos.hpp"
#include "sgtraffic/macro.hpp"
#include "sgtraffic/micro.hpp"

namespace sgtraffic {

struct MomentEstimate {
  Vector mean;
  Vector variance;        ///< unbiased (M - 1) estimator
  Vector standard_error;  ///< sqrt(variance / M)
};

/// Moments of a vector-valued sample function over M i.i.d. xi ~ U(0,1).
/// Each sample returns one vector per snapshot. Results are independent of
/// the worker count (fixed sample order, pairwise reduction).
struct MomentSeries {
  std::vector<double> xi;
  std::vector<MomentEstimate> snapshots;
};

MomentSeries estimate_moments(const std::function<std::vector<Vector>(double)>& sample, int samples,
                              std::uint64_t seed, int workers = 1);

struct MCRun {
  std::string model;
  int samples = 0;
  std::uint64_t seed = 0;
  double a = 0.0;
  double b = 0.0;
  int cells = 0;
  std::vector<double> times;
  std::vector<MomentEstimate> estimates;
  std::vector<double> xi;
};

/// Riemann problem of the macroscopic model, one deterministic run per sample.
MCRun mc_solve(const MacroRunConfig& config, const RiemannData& data, int samples,
               std::uint64_t seed, int workers = 1);

struct CompareSnapshot {
  double time = 0.0;
  double l1_mean = 0.0;        ///< (1/(b-a)) sum_j |mean_SG - mean_MC| dx
  double linf_mean = 0.0;
  double l1_variance = 0.0;
  double l1_standard_error = 0.0;
  double threshold = 0.0;      ///< max(3 * l1_standard_error, atol)
  bool passed = false;
};

struct CompareReport {
  std::vector<CompareSnapshot> snapshots;
  double atol = 5e-3;
  bool passed = false;
};

/// SG snapshots (matched by time) against an MC run on the same grid.
CompareReport compare(const std::vector<MacroField>& sg_snapshots, const MCRun& mc, double atol = 5e-3);

}  // namespace sgtraffic
