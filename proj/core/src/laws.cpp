#include "sgtraffic/laws.hpp"

#include <fmt/format.h>

namespace sgtraffic {

ScalarLaw ScalarLaw::make_affine(double offset, double slope, std::string name) {
  ScalarLaw law;
  law.value = [offset, slope](double rho) { return offset + slope * rho; };
  law.derivative = [slope](double) { return slope; };
  law.affine = std::make_pair(offset, slope);
  law.name = name.empty() ? fmt::format("{} + {}*rho", offset, slope) : std::move(name);
  return law;
}

ScalarLaw greenshields_law() { return ScalarLaw::make_affine(1.0, -1.0, "1 - rho"); }

ScalarLaw linear_hesitation(double scale) {
  return ScalarLaw::make_affine(0.0, scale, fmt::format("{}*rho", scale));
}

GalerkinVector project_law(const ScalarLaw& law, const GalerkinVector& rho, const Basis& basis) {
  require_size(rho, basis.size(), "project_law");
  if (law.affine) {
    GalerkinVector out = law.affine->second * rho;
    out[0] += law.affine->first;
    return out;
  }
  return basis.compose(rho, law.value);
}

}  // namespace sgtraffic
