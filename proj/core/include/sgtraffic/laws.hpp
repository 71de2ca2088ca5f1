#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sgtraffic/chaos.hpp"

namespace sgtraffic {

/// Scalar closure g(rho) (equilibrium speed, hesitation). Affine laws
/// a + b*rho are projected exactly; anything else pseudo-spectrally.
struct ScalarLaw {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::optional<std::pair<double, double>> affine;
  std::string name;

  double operator()(double rho) const { return value(rho); }

  static ScalarLaw make_affine(double offset, double slope, std::string name = {});
};

/// V_eq(rho) = 1 - rho.
ScalarLaw greenshields_law();
/// h(rho) = scale * rho.
ScalarLaw linear_hesitation(double scale = 1.0);

/// Coefficients of g(rho(xi)) for rho in the span.
GalerkinVector project_law(const ScalarLaw& law, const GalerkinVector& rho, const Basis& basis);

}  // namespace sgtraffic
