#include "qpr/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "qpr/csv.hpp"
#include "qpr/error.hpp"

namespace qpr {

std::vector<double> energy_range(double lo, double hi, double step) {
  require(step > 0.0 && hi >= lo, ErrorKind::config, "scan: need energy_max >= energy_min and step > 0");
  const double count = std::floor((hi - lo) / step + 1e-9);
  require(count < 1e5, ErrorKind::config, "scan: too many energies");
  std::vector<double> out;
  for (long i = 0; i <= static_cast<long>(count); ++i) {
    const double e = lo + static_cast<double>(i) * step;
    out.push_back(std::round(e * 1e9) / 1e9);
  }
  return out;
}

RunConfig default_config() {
  RunConfig c;
  c.scan_energies = energy_range(10.0, 20.0, 0.2);
  c.protocol_blocks = {{16.4, 0.02}, {16.4, 0.028}, {16.4, 0.042}, {17.6, 0.02}};
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(begin, &end);
  if (v.empty() || end != begin + v.size() || errno == ERANGE || !std::isfinite(d)) {
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  }
  return d;
}

std::size_t to_size(const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  if (v.empty() || v[0] == '-' || v[0] == '+') throw std::invalid_argument("expected a count, got '" + v + "'");
  const unsigned long long n = std::strtoull(begin, &end, 10);
  if (end != begin + v.size() || errno == ERANGE) {
    throw std::invalid_argument("expected a count, got '" + v + "'");
  }
  return static_cast<std::size_t>(n);
}

std::string blocks_to_string(const std::vector<ProtocolBlock>& blocks) {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) s += ", ";
    s += format_double(blocks[i].energy) + ":" + format_double(blocks[i].spread);
  }
  return s;
}

std::vector<ProtocolBlock> parse_blocks(const std::string& v) {
  std::vector<ProtocolBlock> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("protocol block '" + item + "' is not energy:spread");
    }
    out.push_back({to_double(trim(item.substr(0, colon))), to_double(trim(item.substr(colon + 1)))});
  }
  if (out.empty()) throw std::invalid_argument("no protocol blocks given");
  return out;
}

const char* policy_name(PolicyVariant p) {
  return p == PolicyVariant::rotate_once ? "rotate_once" : "rotate_every_cycle";
}

struct Entry {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
  bool affects_results = true;
};

struct ScanRange {
  double lo = 10.0, hi = 20.0, step = 0.2;
};

std::vector<Entry> registry(RunConfig& c, ScanRange& scan) {
  std::vector<Entry> e;
  auto num = [&](const char* sec, const char* key, double& ref) {
    e.push_back({sec, key, [&ref](const std::string& v) { ref = to_double(v); },
                 [&ref] { return format_double(ref); }});
  };
  auto count = [&](const char* sec, const char* key, std::size_t& ref) {
    e.push_back({sec, key, [&ref](const std::string& v) { ref = to_size(v); },
                 [&ref] { return std::to_string(ref); }});
  };
  num("model", "m_star_rel", c.m_star_rel);
  num("model", "epsilon_r", c.epsilon_r);

  num("geometry", "y_c", c.geometry.y_c);
  num("geometry", "V0", c.geometry.V0);
  num("geometry", "hbar_omega", c.geometry.hbar_omega);
  num("geometry", "v_x", c.geometry.v_x);
  num("geometry", "r", c.geometry.r);
  num("geometry", "s", c.geometry.s);
  num("geometry", "d", c.geometry.d);
  num("geometry", "wire_half_width", c.geometry.wire_half_width);

  num("dot", "grid_half_extent", c.dot_grid.half_extent);
  count("dot", "grid_n", c.dot_grid.n);
  count("dot", "n_states", c.dot.n_states);
  count("dot", "block_per_parity", c.dot.block_per_parity);
  num("dot", "tau", c.dot.tau);
  num("dot", "chebyshev_tol", c.dot.chebyshev_tol);
  num("dot", "residual_tol", c.dot.residual_tol);
  count("dot", "max_iterations", c.dot.max_iterations);

  num("wire", "grid_half_extent", c.wire_grid.half_extent);
  count("wire", "grid_n", c.wire_grid.n);
  num("wire", "transverse_energy_meV", c.transverse_energy);

  num("coupling", "prune_fraction", c.coupling.prune_fraction);
  num("coupling", "refinement_tol", c.coupling.refinement_tol);
  count("coupling", "refinement_samples", c.coupling.refinement_samples);

  num("stepper", "dt", c.stepper.dt);
  num("stepper", "tol", c.stepper.tol);
  num("stepper", "max_time", c.stepper.max_time);
  num("stepper", "stop_fraction", c.stepper.stop_fraction);
  num("stepper", "trapped_fraction", c.stepper.trapped_fraction);
  num("stepper", "settle_change", c.stepper.settle_change);
  num("stepper", "edge_fraction", c.stepper.edge_fraction);
  num("stepper", "edge_width", c.stepper.edge_width);
  num("stepper", "window_half_width", c.stepper.window_half_width);
  num("stepper", "coupling_cut", c.stepper.coupling_cut);
  count("stepper", "max_terms", c.stepper.max_terms);

  num("extraction", "discard_fraction", c.extraction.discard_fraction);
  num("extraction", "max_defect", c.extraction.max_defect);

  num("scan", "energy_min", scan.lo);
  num("scan", "energy_max", scan.hi);
  num("scan", "energy_step", scan.step);
  num("scan", "energy_spread", c.scan_spread);

  e.push_back({"protocol", "blocks",
               [&c](const std::string& v) { c.protocol_blocks = parse_blocks(v); },
               [&c] { return blocks_to_string(c.protocol_blocks); }});
  count("protocol", "n_cycles", c.n_cycles);
  e.push_back({"protocol", "policy",
               [&c](const std::string& v) {
                 if (v == "rotate_once") {
                   c.policy = PolicyVariant::rotate_once;
                 } else if (v == "rotate_every_cycle") {
                   c.policy = PolicyVariant::rotate_every_cycle;
                 } else {
                   throw std::invalid_argument("policy must be rotate_once or rotate_every_cycle");
                 }
               },
               [&c] { return std::string(policy_name(c.policy)); }});

  e.push_back({"run", "output_dir", [&c](const std::string& v) { c.output_dir = v; },
               [&c] { return c.output_dir.string(); }, false});
  e.push_back({"run", "threads", [&c](const std::string& v) { c.threads = to_size(v); },
               [&c] { return std::to_string(c.threads); }, false});
  return e;
}

ScanRange scan_range_of(const RunConfig& c) {
  ScanRange r;
  if (c.scan_energies.empty()) return r;
  r.lo = c.scan_energies.front();
  r.hi = c.scan_energies.back();
  r.step = c.scan_energies.size() > 1 ? c.scan_energies[1] - c.scan_energies[0] : 1.0;
  return r;
}

bool power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = default_config();
  ScanRange scan;
  auto entries = registry(cfg, scan);
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  std::vector<std::string> seen;
  auto error = [&](const std::string& what) {
    fail(ErrorKind::config, "config line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& e : entries) known = known || e.section == section;
      if (!known) error("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) error("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) error("key '" + key + "' outside any section");
    Entry* hit = nullptr;
    for (auto& e : entries) {
      if (e.section == section && e.key == key) hit = &e;
    }
    if (!hit) error("unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    for (const auto& s : seen) {
      if (s == full) error("duplicate key '" + full + "'");
    }
    seen.push_back(full);
    try {
      hit->set(value);
    } catch (const std::invalid_argument& ex) {
      error(full + ": " + ex.what());
    }
  }
  cfg.scan_energies = energy_range(scan.lo, scan.hi, scan.step);
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorKind::config, "config: " + what); };
  PhysicalModel model;
  try {
    model = c.model();
    c.geometry.validate();
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }
  check(power_of_two(c.dot_grid.n), "dot.grid_n must be a power of two >= 8");
  const double l_osc = dot_oscillator_length(c.geometry, model);
  check(c.dot_grid.half_extent >= c.geometry.y_c + 5.0 * l_osc,
        "dot.grid_half_extent must be at least y_c + 5 l_osc = " +
            format_double(c.geometry.y_c + 5.0 * l_osc) + " nm");
  check(c.dot.n_states >= 2 && c.dot.n_states <= 8, "dot.n_states must lie in [2, 8]");
  check(c.dot.tau > 0.0, "dot.tau must be positive");
  check(c.dot.chebyshev_tol > 0.0 && c.dot.chebyshev_tol < 1.0, "dot.chebyshev_tol must lie in (0, 1)");
  check(c.dot.residual_tol > 0.0, "dot.residual_tol must be positive");
  check(c.dot.max_iterations >= 1, "dot.max_iterations must be >= 1");

  check(power_of_two(c.wire_grid.n), "wire.grid_n must be a power of two >= 8");
  check(c.wire_grid.half_extent >= model.coulomb_coeff / 0.01,
        "wire.grid_half_extent must reach the Coulomb far field (" +
            format_double(model.coulomb_coeff / 0.01) + " nm)");
  check(c.transverse_energy >= 0.0, "wire.transverse_energy_meV must be >= 0");

  check(c.coupling.prune_fraction >= 0.0 && c.coupling.prune_fraction < 1.0,
        "coupling.prune_fraction must lie in [0, 1)");
  check(c.coupling.refinement_tol > 0.0, "coupling.refinement_tol must be positive");
  check(c.coupling.refinement_samples >= 2, "coupling.refinement_samples must be >= 2");

  const auto& s = c.stepper;
  check(s.dt > 0.0, "stepper.dt must be positive");
  check(s.tol > 0.0 && s.tol < 1.0, "stepper.tol must lie in (0, 1)");
  check(s.max_time > 0.0, "stepper.max_time must be positive");
  check(s.stop_fraction > 0.0 && s.stop_fraction < 1.0, "stepper.stop_fraction must lie in (0, 1)");
  check(s.trapped_fraction >= 0.0 && s.trapped_fraction < 1.0,
        "stepper.trapped_fraction must lie in [0, 1)");
  check(s.settle_change > 0.0, "stepper.settle_change must be positive");
  check(s.edge_fraction > 0.0 && s.edge_fraction < 1.0, "stepper.edge_fraction must lie in (0, 1)");
  check(s.edge_width > 0.0 && s.edge_width < 0.5, "stepper.edge_width must lie in (0, 0.5)");
  check(s.coupling_cut > 0.0 && s.coupling_cut < 1.0, "stepper.coupling_cut must lie in (0, 1)");
  check(s.max_terms >= 8, "stepper.max_terms must be >= 8");

  check(c.extraction.discard_fraction >= 0.0 && c.extraction.discard_fraction < 1.0,
        "extraction.discard_fraction must lie in [0, 1)");
  check(c.extraction.max_defect > 0.0, "extraction.max_defect must be positive");

  const double dx = 2.0 * c.wire_grid.half_extent / static_cast<double>(c.wire_grid.n);
  const double k_limit = 0.5 * std::acos(-1.0) / dx;
  auto resolvable = [&](double quoted, double spread, const std::string& what) {
    check(spread > 0.0 && spread < 0.2, what + ": energy spread must lie in (0, 0.2)");
    const double el = quoted - c.transverse_energy;
    if (el <= 0.0) return;
    check(std::sqrt(el / model.kinetic_coeff) < k_limit,
          what + ": wire energy " + format_double(el) + " meV is not resolved by the wire grid");
  };
  check(!c.scan_energies.empty(), "scan: no energies");
  for (double e : c.scan_energies) resolvable(e, c.scan_spread, "scan");
  check(c.n_cycles >= 1 && c.n_cycles <= 12, "protocol.n_cycles must lie in [1, 12]");
  check(!c.protocol_blocks.empty(), "protocol: no blocks");
  for (const auto& b : c.protocol_blocks) {
    check(b.energy > c.transverse_energy,
          "protocol: block energy " + format_double(b.energy) + " meV lies below the transverse energy");
    resolvable(b.energy, b.spread, "protocol");
  }
  check(c.threads >= 1, "run.threads must be >= 1");
}

std::string canonical_echo(const RunConfig& cfg) {
  RunConfig copy = cfg;
  ScanRange scan = scan_range_of(cfg);
  std::string out;
  for (const auto& e : registry(copy, scan)) {
    if (!e.affects_results) continue;
    out += e.section + "." + e.key + " = " + e.get() + "\n";
  }
  out += "scan.energies = ";
  for (std::size_t i = 0; i < cfg.scan_energies.size(); ++i) {
    if (i) out += ",";
    out += format_double(cfg.scan_energies[i]);
  }
  out += "\n";
  return out;
}

}  // namespace qpr
