#pragma once

// CSV and SVG writers. Numbers use the shortest representation that reads
// back to the same double, so identical runs give identical bytes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sgtraffic/analysis.hpp"
#include "sgtraffic/chaos.hpp"
#include "sgtraffic/kinetic.hpp"
#include "sgtraffic/macro.hpp"
#include "sgtraffic/mc_oracle.hpp"
#include "sgtraffic/micro.hpp"

namespace sgtraffic {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Shortest round-trip decimal; inf and nan spelled out.
std::string format_number(double value);

/// Nonzero tensor entries: l,i,j,value.
std::string tensor_csv(const TripleProductTensor& tensor);

/// t,vehicle,mode,x,v. Velocities of first-order runs are the right-hand side.
std::string trajectory_csv(const std::vector<MicroState>& states, const MicroParams& params,
                           const TripleProductTensor& tensor);

/// t,vehicle,mode,rho for the gaps i -> i+1.
std::string local_density_csv(const std::vector<MicroState>& states, const MicroParams& params,
                               const Basis& basis);

/// t,x,mode,rho,q
std::string kinetic_moments_csv(const std::vector<KineticSnapshot>& snapshots, const KineticGrid& grid);

/// t,x,w,mode,g
std::string kinetic_field_csv(const std::vector<KineticSnapshot>& snapshots, const KineticGrid& grid);

/// t,x,mode,rho (and z for ARZ)
std::string macro_csv(const std::vector<MacroField>& snapshots, const MacroGrid& grid);

/// run_id,rho_r,x,mean_rho,var_rho,mean_flux,var_flux
std::string fd_points_csv(const std::vector<FDPoint>& points);

std::string fd_bins_csv(const std::vector<FDBin>& bins);

/// Minimal scatter plot of mean flux against mean density.
std::string fd_svg(const std::vector<FDPoint>& points);

/// t,x,mean,variance,standard_error
std::string mc_moments_csv(const MCRun& run);

/// Writes bytes exactly; creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace sgtraffic
