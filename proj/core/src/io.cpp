#include "sgtraffic/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace sgtraffic {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

std::string tensor_csv(const TripleProductTensor& tensor) {
  std::string out = "l,i,j,value\n";
  for (int l = 0; l < tensor.size(); ++l) {
    const Matrix& m = tensor[l];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) out += fmt::format("{},{},{},{}\n", l, i, j, format_number(m(i, j)));
      }
    }
  }
  return out;
}

std::string trajectory_csv(const std::vector<MicroState>& states, const MicroParams& params,
                           const TripleProductTensor& tensor) {
  std::string out = "t,vehicle,mode,x,v\n";
  for (const MicroState& s : states) {
    const Matrix v = s.second_order() ? s.velocities : micro_rhs_first_order(s, params, tensor.basis());
    const std::string t = format_number(s.time);
    for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
      for (Eigen::Index k = 0; k < s.positions.cols(); ++k) {
        out += fmt::format("{},{},{},{},{}\n", t, i, k, format_number(s.positions(i, k)),
                           format_number(v(i, k)));
      }
    }
  }
  return out;
}

std::string local_density_csv(const std::vector<MicroState>& states, const MicroParams& params,
                              const Basis& basis) {
  std::string out = "t,vehicle,mode,rho\n";
  for (const MicroState& s : states) {
    const Matrix rho = reconstruct_local_density(s, params, basis);
    const std::string t = format_number(s.time);
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      for (Eigen::Index k = 0; k < rho.cols(); ++k) {
        out += fmt::format("{},{},{},{}\n", t, i, k, format_number(rho(i, k)));
      }
    }
  }
  return out;
}

std::string kinetic_moments_csv(const std::vector<KineticSnapshot>& snapshots, const KineticGrid& grid) {
  std::string out = "t,x,mode,rho,q\n";
  for (const KineticSnapshot& s : snapshots) {
    const std::string t = format_number(s.field.time);
    for (Eigen::Index j = 0; j < s.moments.rho.rows(); ++j) {
      const std::string x = format_number(grid.center(static_cast<int>(j)));
      for (Eigen::Index k = 0; k < s.moments.rho.cols(); ++k) {
        out += fmt::format("{},{},{},{},{}\n", t, x, k, format_number(s.moments.rho(j, k)),
                           format_number(s.moments.q(j, k)));
      }
    }
  }
  return out;
}

std::string kinetic_field_csv(const std::vector<KineticSnapshot>& snapshots, const KineticGrid& grid) {
  std::string out = "t,x,w,mode,g\n";
  for (const KineticSnapshot& s : snapshots) {
    const std::string t = format_number(s.field.time);
    for (int j = 0; j < s.field.cells; ++j) {
      const std::string x = format_number(grid.center(j));
      for (int m = 0; m < s.field.velocity_cells; ++m) {
        const std::string w = format_number(grid.speed(m));
        const auto row = s.field.g.row(s.field.row(j, m));
        for (Eigen::Index k = 0; k < row.size(); ++k) {
          out += fmt::format("{},{},{},{},{}\n", t, x, w, k, format_number(row[k]));
        }
      }
    }
  }
  return out;
}

std::string macro_csv(const std::vector<MacroField>& snapshots, const MacroGrid& grid) {
  const bool arz = !snapshots.empty() && snapshots.front().model == MacroModel::arz;
  std::string out = arz ? "t,x,mode,rho,z\n" : "t,x,mode,rho\n";
  for (const MacroField& f : snapshots) {
    const std::string t = format_number(f.time);
    for (int j = 0; j < f.cells(); ++j) {
      const std::string x = format_number(grid.center(j));
      for (Eigen::Index k = 0; k < f.rho.cols(); ++k) {
        if (arz) {
          out += fmt::format("{},{},{},{},{}\n", t, x, k, format_number(f.rho(j, k)),
                             format_number(f.z(j, k)));
        } else {
          out += fmt::format("{},{},{},{}\n", t, x, k, format_number(f.rho(j, k)));
        }
      }
    }
  }
  return out;
}

std::string fd_points_csv(const std::vector<FDPoint>& points) {
  std::string out = "run_id,rho_r,x,mean_rho,var_rho,mean_flux,var_flux\n";
  for (const FDPoint& p : points) {
    out += fmt::format("{},{},{},{},{},{},{}\n", p.run_id, format_number(p.rho_r), format_number(p.x),
                       format_number(p.mean_rho), format_number(p.var_rho), format_number(p.mean_flux),
                       format_number(p.var_flux));
  }
  return out;
}

std::string fd_bins_csv(const std::vector<FDBin>& bins) {
  std::string out =
      "lo,hi,count,min_flux,max_flux,flux_spread,residual_spread,mean_var_rho,mean_var_flux\n";
  for (const FDBin& b : bins) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_number(b.lo), format_number(b.hi), b.count,
                       format_number(b.min_flux), format_number(b.max_flux), format_number(b.flux_spread),
                       format_number(b.residual_spread), format_number(b.mean_var_rho),
                       format_number(b.mean_var_flux));
  }
  return out;
}

std::string fd_svg(const std::vector<FDPoint>& points) {
  constexpr double width = 480.0;
  constexpr double height = 360.0;
  constexpr double margin = 40.0;
  const auto px = [&](double rho) { return margin + rho * (width - 2 * margin); };
  const auto py = [&](double flux) { return height - margin - flux / 0.3 * (height - 2 * margin); };
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n"
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n"
      "<text x=\"{}\" y=\"{}\" font-size=\"12\">density</text>\n"
      "<text x=\"4\" y=\"{}\" font-size=\"12\">flux</text>\n",
      width, height, margin, height - margin, width - margin, height - margin, margin, margin, margin,
      height - margin, width / 2, height - 10, margin - 8);
  for (const FDPoint& p : points) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1\" fill=\"steelblue\"/>\n", px(p.mean_rho),
                       py(std::clamp(p.mean_flux, 0.0, 0.3)));
  }
  out += "</svg>\n";
  return out;
}

std::string mc_moments_csv(const MCRun& run) {
  std::string out = "t,x,mean,variance,standard_error\n";
  const double dx = (run.b - run.a) / run.cells;
  for (std::size_t s = 0; s < run.times.size(); ++s) {
    const std::string t = format_number(run.times[s]);
    const MomentEstimate& e = run.estimates[s];
    for (Eigen::Index j = 0; j < e.mean.size(); ++j) {
      out += fmt::format("{},{},{},{},{}\n", t, format_number(run.a + (j + 0.5) * dx),
                         format_number(e.mean[j]), format_number(e.variance[j]),
                         format_number(e.standard_error[j]));
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace sgtraffic
