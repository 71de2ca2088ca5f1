#include "sgtraffic/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace sgtraffic {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

std::string message_of(const std::vector<ConfigDiagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += '\n';
    out += d.line > 0 ? fmt::format("line {}: {}", d.line, d.message) : d.message;
  }
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<ConfigDiagnostic>& errors) : errors_(errors) {}

  void error(int line, std::string message) { errors_.push_back({line, std::move(message)}); }

  std::optional<double> real(const Entry& e, const std::string& key) {
    const std::string v = lower(e.value);
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(e.value.c_str(), &end);
    if (e.value.empty() || end != e.value.c_str() + e.value.size() || errno == ERANGE || std::isnan(x)) {
      error(e.line, fmt::format("{}: expected a number, got '{}'", key, e.value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<long long> integer(const Entry& e, const std::string& key) {
    long long x = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (e.value.empty() || ec != std::errc() || ptr != last) {
      error(e.line, fmt::format("{}: expected an integer, got '{}'", key, e.value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> unsigned64(const Entry& e, const std::string& key) {
    std::uint64_t x = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (e.value.empty() || ec != std::errc() || ptr != last) {
      error(e.line, fmt::format("{}: expected an unsigned 64-bit integer, got '{}'", key, e.value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<bool> boolean(const Entry& e, const std::string& key) {
    const std::string v = lower(e.value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    error(e.line, fmt::format("{}: expected true or false, got '{}'", key, e.value));
    return std::nullopt;
  }

  std::optional<std::vector<double>> reals(const Entry& e, const std::string& key) {
    std::vector<double> out;
    bool ok = true;
    for (const std::string& item : split_list(e.value)) {
      const auto x = real({item, e.line}, key);
      if (x) {
        out.push_back(*x);
      } else {
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<int>> integers(const Entry& e, const std::string& key) {
    std::vector<int> out;
    bool ok = true;
    for (const std::string& item : split_list(e.value)) {
      const auto x = integer({item, e.line}, key);
      if (x && *x >= std::numeric_limits<int>::min() && *x <= std::numeric_limits<int>::max()) {
        out.push_back(static_cast<int>(*x));
      } else {
        if (x) error(e.line, fmt::format("{}: value {} out of range", key, *x));
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

 private:
  std::vector<ConfigDiagnostic>& errors_;
};

template <typename T>
void assign(std::optional<T> value, T& target) {
  if (value) target = *value;
}

void assign_int(const std::optional<long long>& value, int& target, Parser& p, const Entry& e,
                const std::string& key) {
  if (!value) return;
  if (*value < std::numeric_limits<int>::min() || *value > std::numeric_limits<int>::max()) {
    p.error(e.line, fmt::format("{}: value {} out of range", key, *value));
    return;
  }
  target = static_cast<int>(*value);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt::format("{}", v[i]);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt::format("{}", v[i]);
  return out;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<ConfigDiagnostic> diagnostics)
    : ConfigError(message_of(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::string to_string(ModelType type) {
  switch (type) {
    case ModelType::micro: return "micro";
    case ModelType::kinetic: return "kinetic";
    case ModelType::lwr: return "lwr";
    case ModelType::arz: return "arz";
  }
  return "?";
}

std::string to_string(ExperimentType type) {
  switch (type) {
    case ExperimentType::none: return "none";
    case ExperimentType::micro2macro: return "micro2macro";
    case ExperimentType::meso2macro: return "meso2macro";
    case ExperimentType::fdscan: return "fdscan";
    case ExperimentType::mccompare: return "mccompare";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<ConfigDiagnostic> errors;
  std::map<std::string, Entry> entries;

  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back({number, fmt::format("expected 'section.key = value', got '{}'", line)});
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      errors.push_back({number, fmt::format("key '{}' has no section", key)});
      continue;
    }
    if (value.empty()) {
      errors.push_back({number, fmt::format("{}: empty value", key)});
      continue;
    }
    if (const auto it = entries.find(key); it != entries.end()) {
      errors.push_back(
          {number, fmt::format("duplicate key '{}' (lines {} and {})", key, it->second.line, number)});
      continue;
    }
    entries.emplace(key, Entry{value, number});
  }

  ExperimentConfig c;
  Parser p(errors);
  std::map<std::string, int> seen;  // key -> line, for range diagnostics
  bool cells_set = false;
  std::optional<Entry> dx_entry;

  using Handler = std::function<void(const Entry&, const std::string&)>;
  const std::map<std::string, Handler> handlers = {
      {"basis.family",
       [&](const Entry& e, const std::string& k) {
         try {
           c.basis.family = parse_basis_family(lower(e.value));
         } catch (const InvalidArgument&) {
           p.error(e.line, fmt::format("{}: expected haar or legendre, got '{}'", k, e.value));
         }
       }},
      {"basis.K", [&](const Entry& e, const std::string& k) { assign_int(p.integer(e, k), c.basis.order, p, e, k); }},
      {"basis.Q", [&](const Entry& e, const std::string& k) { assign_int(p.integer(e, k), c.basis.quadrature, p, e, k); }},
      {"model.type",
       [&](const Entry& e, const std::string& k) {
         const std::string v = lower(e.value);
         if (v == "micro") c.model.type = ModelType::micro;
         else if (v == "kinetic") c.model.type = ModelType::kinetic;
         else if (v == "lwr") c.model.type = ModelType::lwr;
         else if (v == "arz") c.model.type = ModelType::arz;
         else p.error(e.line, fmt::format("{}: expected micro, kinetic, lwr or arz, got '{}'", k, e.value));
       }},
      {"model.v_max", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.v_max); }},
      {"model.hesitation", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.hesitation_scale); }},
      {"model.relaxation", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.relaxation); }},
      {"model.order",
       [&](const Entry& e, const std::string& k) {
         const auto v = p.integer(e, k);
         if (!v) return;
         if (*v == 1) c.model.order = MicroOrder::first;
         else if (*v == 2) c.model.order = MicroOrder::second;
         else p.error(e.line, fmt::format("{}: must be 1 or 2, got {}", k, *v));
       }},
      {"model.vehicles", [&](const Entry& e, const std::string& k) { assign_int(p.integer(e, k), c.model.vehicles, p, e, k); }},
      {"model.length", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.length); }},
      {"model.leader_speed", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.leader_speed); }},
      {"model.leader_accel", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.leader_accel); }},
      {"model.C", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.C); }},
      {"model.A", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.A); }},
      {"model.reaction_time", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.reaction_time); }},
      {"model.perception_noise", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.model.perception_noise); }},
      {"grid.a", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.a); }},
      {"grid.b", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.b); }},
      {"grid.cells",
       [&](const Entry& e, const std::string& k) {
         cells_set = true;
         assign_int(p.integer(e, k), c.grid.cells, p, e, k);
       }},
      {"grid.dx", [&](const Entry& e, const std::string&) { dx_entry = e; }},
      {"grid.final_time", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.final_time); }},
      {"grid.cfl", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.cfl); }},
      {"grid.boundary",
       [&](const Entry& e, const std::string& k) {
         const std::string v = lower(e.value);
         if (v == "outflow") c.grid.boundary = Boundary::outflow;
         else if (v == "periodic") c.grid.boundary = Boundary::periodic;
         else p.error(e.line, fmt::format("{}: expected outflow or periodic, got '{}'", k, e.value));
       }},
      {"grid.velocity_cells", [&](const Entry& e, const std::string& k) { assign_int(p.integer(e, k), c.grid.velocity_cells, p, e, k); }},
      {"grid.w_max", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.w_max); }},
      {"grid.box_width", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.box_width); }},
      {"grid.dt", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.grid.dt); }},
      {"initial.type",
       [&](const Entry& e, const std::string& k) {
         const std::string v = lower(e.value);
         if (v == "riemann") c.initial.type = InitialType::riemann;
         else if (v == "platoon") c.initial.type = InitialType::platoon;
         else p.error(e.line, fmt::format("{}: expected riemann or platoon, got '{}'", k, e.value));
       }},
      {"initial.left_min", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.riemann.left_min); }},
      {"initial.left_max", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.riemann.left_max); }},
      {"initial.right", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.riemann.right); }},
      {"initial.split", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.riemann.split); }},
      {"initial.leader_position", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.leader_position); }},
      {"initial.headway", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.headway); }},
      {"initial.noise", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.initial.noise); }},
      {"output.times", [&](const Entry& e, const std::string& k) { assign(p.reals(e, k), c.output.times); }},
      {"output.snapshot_interval", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.output.snapshot_interval); }},
      {"output.full_field", [&](const Entry& e, const std::string& k) { assign(p.boolean(e, k), c.output.full_field); }},
      {"output.svg", [&](const Entry& e, const std::string& k) { assign(p.boolean(e, k), c.output.svg); }},
      {"experiment.type",
       [&](const Entry& e, const std::string& k) {
         const std::string v = lower(e.value);
         if (v == "none") c.experiment.type = ExperimentType::none;
         else if (v == "micro2macro") c.experiment.type = ExperimentType::micro2macro;
         else if (v == "meso2macro") c.experiment.type = ExperimentType::meso2macro;
         else if (v == "fdscan") c.experiment.type = ExperimentType::fdscan;
         else if (v == "mccompare") c.experiment.type = ExperimentType::mccompare;
         else p.error(e.line, fmt::format("{}: expected none, micro2macro, meso2macro, fdscan or mccompare, got '{}'", k, e.value));
       }},
      {"experiment.resolutions", [&](const Entry& e, const std::string& k) { assign(p.integers(e, k), c.experiment.resolutions); }},
      {"experiment.reference_cells", [&](const Entry& e, const std::string& k) { assign_int(p.integer(e, k), c.experiment.reference_cells, p, e, k); }},
      {"experiment.buffer", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.experiment.buffer); }},
      {"experiment.dt_factor", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.experiment.dt_factor); }},
      {"experiment.relaxations", [&](const Entry& e, const std::string& k) { assign(p.reals(e, k), c.experiment.relaxations); }},
      {"experiment.right_states", [&](const Entry& e, const std::string& k) { assign(p.reals(e, k), c.experiment.right_states); }},
      {"experiment.bin_width", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.experiment.bin_width); }},
      {"experiment.samples", [&](const Entry& e, const std::string& k) { assign_int(p.integer(e, k), c.experiment.samples, p, e, k); }},
      {"experiment.seed", [&](const Entry& e, const std::string& k) { assign(p.unsigned64(e, k), c.experiment.seed); }},
      {"experiment.atol", [&](const Entry& e, const std::string& k) { assign(p.real(e, k), c.experiment.atol); }},
      {"experiment.orders", [&](const Entry& e, const std::string& k) { assign(p.integers(e, k), c.experiment.orders); }},
  };

  for (const auto& [key, entry] : entries) {
    const auto h = handlers.find(key);
    if (h == handlers.end()) {
      errors.push_back({entry.line, fmt::format("unknown key '{}'", key)});
      continue;
    }
    seen[key] = entry.line;
    h->second(entry, key);
  }

  const auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  const auto check = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) errors.push_back({line_of(key), fmt::format("{}: {}", key, what)});
  };

  if (dx_entry) {
    if (cells_set) {
      errors.push_back({dx_entry->line, fmt::format("grid.dx conflicts with grid.cells (line {})",
                                                    line_of("grid.cells"))});
    } else if (const auto dx = p.real(*dx_entry, "grid.dx")) {
      const double n = (c.grid.b - c.grid.a) / *dx;
      if (!(*dx > 0.0) || !(n >= 1.0) || std::abs(n - std::round(n)) > 1e-6 * n) {
        errors.push_back({dx_entry->line, "grid.dx: must divide b - a into a whole number of cells"});
      } else {
        c.grid.cells = static_cast<int>(std::round(n));
        seen["grid.cells"] = dx_entry->line;
      }
    }
  }

  // ranges
  check(c.basis.order >= 0, "basis.K", fmt::format("must be >= 0, got {}", c.basis.order));
  if (c.basis.order >= 0 && c.basis.family == BasisFamily::haar) {
    check(is_power_of_two(c.basis.order + 1), "basis.K",
          fmt::format("Haar needs K + 1 to be a power of two, got K = {}", c.basis.order));
  }
  check(c.basis.quadrature >= 0, "basis.Q", "must be >= 0 (0 picks the default rule)");
  check(c.model.v_max > 0.0 && std::isfinite(c.model.v_max), "model.v_max", "must be positive");
  check(c.model.hesitation_scale >= 0.0 && std::isfinite(c.model.hesitation_scale), "model.hesitation",
        "must be nonnegative");
  check(c.model.relaxation > 0.0, "model.relaxation", "must be positive (inf disables relaxation)");
  check(c.model.vehicles >= 2, "model.vehicles", "need at least two vehicles");
  check(c.model.length > 0.0 && std::isfinite(c.model.length), "model.length", "must be positive");
  check(c.model.reaction_time > 0.0, "model.reaction_time", "must be positive");
  check(c.model.perception_noise >= 0.0, "model.perception_noise", "must be nonnegative");
  check(c.grid.b > c.grid.a, "grid.b", "must exceed grid.a");
  check(c.grid.cells >= 1, "grid.cells", "must be >= 1");
  check(c.grid.final_time >= 0.0 && std::isfinite(c.grid.final_time), "grid.final_time",
        "must be finite and nonnegative");
  check(c.grid.cfl > 0.0 && c.grid.cfl <= 1.0, "grid.cfl", "must lie in (0, 1]");
  if (c.model.type == ModelType::kinetic) {
    check(c.grid.cfl <= 0.9, "grid.cfl", "kinetic runs need CFL <= 0.9");
  }
  check(c.grid.velocity_cells >= 1, "grid.velocity_cells", "must be >= 1");
  check(c.grid.w_max > 0.0 && std::isfinite(c.grid.w_max), "grid.w_max", "must be positive");
  check(c.grid.box_width >= 0.0, "grid.box_width", "must be nonnegative");
  check(c.grid.dt > 0.0, "grid.dt", "must be positive");
  const auto& r = c.initial.riemann;
  check(r.left_min >= 0.0 && r.left_min <= 1.0, "initial.left_min", "must lie in [0, 1]");
  check(r.left_max >= 0.0 && r.left_max <= 1.0, "initial.left_max", "must lie in [0, 1]");
  check(r.left_min <= r.left_max, "initial.left_max", "must be >= initial.left_min");
  check(r.right >= 0.0 && r.right <= 1.0, "initial.right", "must lie in [0, 1]");
  check(r.split >= c.grid.a && r.split <= c.grid.b, "initial.split", "must lie in [grid.a, grid.b]");
  check(c.initial.headway > 0.0, "initial.headway", "must be positive");
  check(c.initial.noise >= 0.0, "initial.noise", "must be nonnegative");
  for (double t : c.output.times) {
    check(t >= 0.0 && t <= c.grid.final_time, "output.times",
          fmt::format("time {} outside [0, grid.final_time]", t));
  }
  check(c.output.snapshot_interval >= 0.0, "output.snapshot_interval", "must be nonnegative");

  const auto& x = c.experiment;
  check(!x.resolutions.empty(), "experiment.resolutions", "must not be empty");
  check(std::all_of(x.resolutions.begin(), x.resolutions.end(), [](int n) { return n >= 1; }),
        "experiment.resolutions", "entries must be positive");
  check(std::is_sorted(x.resolutions.begin(), x.resolutions.end()), "experiment.resolutions",
        "must be ascending");
  check(x.reference_cells >= 1, "experiment.reference_cells", "must be >= 1");
  check(x.buffer >= 0.0, "experiment.buffer", "must be nonnegative");
  check(x.dt_factor > 0.0, "experiment.dt_factor", "must be positive");
  check(!x.relaxations.empty(), "experiment.relaxations", "must not be empty");
  check(std::all_of(x.relaxations.begin(), x.relaxations.end(),
                    [](double e) { return e > 0.0 && std::isfinite(e); }),
        "experiment.relaxations", "entries must be positive and finite");
  check(std::is_sorted(x.relaxations.rbegin(), x.relaxations.rend()), "experiment.relaxations",
        "must be descending");
  check(std::all_of(x.right_states.begin(), x.right_states.end(),
                    [](double v) { return v >= 0.0 && v <= 1.0; }),
        "experiment.right_states", "entries must lie in [0, 1]");
  check(x.bin_width > 0.0 && x.bin_width <= 1.0, "experiment.bin_width", "must lie in (0, 1]");
  check(x.samples >= 2, "experiment.samples", "need at least two samples");
  check(x.atol > 0.0, "experiment.atol", "must be positive");
  check(!x.orders.empty(), "experiment.orders", "must not be empty");
  for (int k : x.orders) {
    check(k >= 0 && (c.basis.family != BasisFamily::haar || is_power_of_two(k + 1)), "experiment.orders",
          fmt::format("order {} is not a valid K for the basis", k));
  }

  // model / experiment compatibility
  const auto needs = [&](ExperimentType type, bool ok, const char* what) {
    if (x.type == type && !ok) {
      errors.push_back({line_of("experiment.type"),
                        fmt::format("experiment.type = {} needs {}", to_string(type), what)});
    }
  };
  needs(ExperimentType::micro2macro, c.model.type == ModelType::lwr, "model.type = lwr");
  needs(ExperimentType::fdscan, c.model.type == ModelType::lwr, "model.type = lwr");
  needs(ExperimentType::meso2macro, c.model.type == ModelType::kinetic, "model.type = kinetic");
  needs(ExperimentType::mccompare, c.model.type == ModelType::lwr || c.model.type == ModelType::arz,
        "model.type = lwr or arz");
  if (c.initial.type == InitialType::platoon && c.model.type != ModelType::micro) {
    errors.push_back({line_of("initial.type"), "initial.type = platoon needs model.type = micro"});
  }

  if (!errors.empty()) {
    std::stable_sort(errors.begin(), errors.end(),
                     [](const ConfigDiagnostic& l, const ConfigDiagnostic& r) { return l.line < r.line; });
    throw ConfigErrors(std::move(errors));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string canonical_text(const ExperimentConfig& c) {
  std::string out;
  const auto put = [&](std::string_view key, const std::string& value) {
    if (!value.empty()) out += fmt::format("{} = {}\n", key, value);
  };
  const auto num = [](double v) { return std::isinf(v) ? std::string(v > 0 ? "inf" : "-inf") : fmt::format("{}", v); };
  put("basis.family", to_string(c.basis.family));
  put("basis.K", fmt::format("{}", c.basis.order));
  put("basis.Q", fmt::format("{}", c.basis.quadrature));
  put("model.type", to_string(c.model.type));
  put("model.v_max", num(c.model.v_max));
  put("model.hesitation", num(c.model.hesitation_scale));
  put("model.relaxation", num(c.model.relaxation));
  put("model.order", fmt::format("{}", static_cast<int>(c.model.order)));
  put("model.vehicles", fmt::format("{}", c.model.vehicles));
  put("model.length", num(c.model.length));
  put("model.leader_speed", num(c.model.leader_speed));
  put("model.leader_accel", num(c.model.leader_accel));
  put("model.C", num(c.model.C));
  put("model.A", num(c.model.A));
  put("model.reaction_time", num(c.model.reaction_time));
  put("model.perception_noise", num(c.model.perception_noise));
  put("grid.a", num(c.grid.a));
  put("grid.b", num(c.grid.b));
  put("grid.cells", fmt::format("{}", c.grid.cells));
  put("grid.final_time", num(c.grid.final_time));
  put("grid.cfl", num(c.grid.cfl));
  put("grid.boundary", to_string(c.grid.boundary));
  put("grid.velocity_cells", fmt::format("{}", c.grid.velocity_cells));
  put("grid.w_max", num(c.grid.w_max));
  put("grid.box_width", num(c.grid.box_width));
  put("grid.dt", num(c.grid.dt));
  put("initial.type", c.initial.type == InitialType::riemann ? "riemann" : "platoon");
  put("initial.left_min", num(c.initial.riemann.left_min));
  put("initial.left_max", num(c.initial.riemann.left_max));
  put("initial.right", num(c.initial.riemann.right));
  put("initial.split", num(c.initial.riemann.split));
  put("initial.leader_position", num(c.initial.leader_position));
  put("initial.headway", num(c.initial.headway));
  put("initial.noise", num(c.initial.noise));
  put("output.times", join(c.output.times));
  put("output.snapshot_interval", num(c.output.snapshot_interval));
  put("output.full_field", c.output.full_field ? "true" : "false");
  put("output.svg", c.output.svg ? "true" : "false");
  put("experiment.type", to_string(c.experiment.type));
  put("experiment.resolutions", join(c.experiment.resolutions));
  put("experiment.reference_cells", fmt::format("{}", c.experiment.reference_cells));
  put("experiment.buffer", num(c.experiment.buffer));
  put("experiment.dt_factor", num(c.experiment.dt_factor));
  put("experiment.relaxations", join(c.experiment.relaxations));
  put("experiment.right_states", join(c.experiment.right_states));
  put("experiment.bin_width", num(c.experiment.bin_width));
  put("experiment.samples", fmt::format("{}", c.experiment.samples));
  put("experiment.seed", fmt::format("{}", c.experiment.seed));
  put("experiment.atol", num(c.experiment.atol));
  put("experiment.orders", join(c.experiment.orders));
  return out;
}

BasisSpec basis_spec(const ExperimentConfig& c) {
  return {c.basis.family, c.basis.order, c.basis.quadrature};
}

ScalarLaw equilibrium_law(const ExperimentConfig& c) {
  if (c.model.v_max == 1.0) return greenshields_law();
  return ScalarLaw::make_affine(c.model.v_max, -c.model.v_max, "greenshields");
}

ScalarLaw hesitation_law(const ExperimentConfig& c) { return linear_hesitation(c.model.hesitation_scale); }

MacroGrid macro_grid(const ExperimentConfig& c) {
  MacroGrid g;
  g.a = c.grid.a;
  g.b = c.grid.b;
  g.cells = c.grid.cells;
  g.final_time = c.grid.final_time;
  g.cfl = c.grid.cfl;
  g.boundary = c.grid.boundary;
  return g;
}

MacroModelSpec macro_spec(const ExperimentConfig& c) {
  MacroModelSpec s;
  s.model = c.model.type == ModelType::arz ? MacroModel::arz : MacroModel::lwr;
  s.v_eq = equilibrium_law(c);
  s.hesitation = hesitation_law(c);
  s.relaxation_time = c.model.relaxation;
  return s;
}

MacroRunConfig macro_run_config(const ExperimentConfig& c) {
  return {macro_grid(c), macro_spec(c), c.output.times};
}

KineticGrid kinetic_grid(const ExperimentConfig& c) {
  KineticGrid g;
  g.a = c.grid.a;
  g.b = c.grid.b;
  g.cells = c.grid.cells;
  g.velocity_cells = c.grid.velocity_cells;
  g.w_max = c.grid.w_max;
  g.relaxation = std::isfinite(c.model.relaxation) ? c.model.relaxation : 0.1;
  g.box_width = c.grid.box_width;
  g.cfl = c.grid.cfl;
  g.final_time = c.grid.final_time;
  g.boundary = c.grid.boundary;
  g.v_eq = equilibrium_law(c);
  g.hesitation = hesitation_law(c);
  return g;
}

MicroParams micro_params(const ExperimentConfig& c) {
  MicroParams p;
  p.vehicles = c.model.vehicles;
  p.length = c.model.length;
  const double v_max = c.model.v_max;
  p.speed = [v_max](double y) { return v_max * greenshields_speed(y); };
  p.leader_speed = c.model.leader_speed;
  p.leader_accel = c.model.leader_accel;
  p.C = c.model.C;
  p.A = c.model.A;
  p.reaction_time = c.model.reaction_time;
  p.perception_noise = c.model.perception_noise;
  return p;
}

MicroRunOptions micro_options(const ExperimentConfig& c) {
  MicroRunOptions o;
  o.dt = c.grid.dt;
  o.final_time = c.grid.final_time;
  o.snapshot_interval = c.output.snapshot_interval;
  o.order = c.model.order;
  return o;
}

FDScanConfig fd_scan_config(const ExperimentConfig& c) {
  FDScanConfig f;
  f.grid = macro_grid(c);
  f.spec = macro_spec(c);
  f.riemann = c.initial.riemann;
  f.right_states = c.experiment.right_states;
  if (f.right_states.empty()) {
    for (int i = 0; i <= 20; ++i) f.right_states.push_back(i / 20.0);
  }
  f.bin_width = c.experiment.bin_width;
  return f;
}

Micro2MacroConfig micro2macro_config(const ExperimentConfig& c) {
  Micro2MacroConfig m;
  m.grid = macro_grid(c);
  m.reference_cells = c.experiment.reference_cells;
  m.spec = macro_spec(c);
  m.riemann = c.initial.riemann;
  m.resolutions = c.experiment.resolutions;
  m.buffer = c.experiment.buffer;
  m.dt_factor = c.experiment.dt_factor;
  return m;
}

Meso2MacroConfig meso2macro_config(const ExperimentConfig& c) {
  Meso2MacroConfig m;
  m.kinetic = kinetic_grid(c);
  m.riemann = c.initial.riemann;
  m.relaxations = c.experiment.relaxations;
  return m;
}

}  // namespace sgtraffic
