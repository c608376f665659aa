#include "qpr/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qpr/coupling.hpp"
#include "qpr/error.hpp"
#include "qpr/parallel.hpp"
#include "qpr/serialize.hpp"

namespace qpr {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1,
          ErrorKind::integrity, "sha256: digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return out.str();
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::dot_solve, Command::couplings, Command::scan, Command::kraus,
                    Command::protocol, Command::all}) {
    if (name == command_name(c)) return c;
  }
  fail(ErrorKind::config, "unknown command '" + name + "'");
}

const char* command_name(Command c) {
  switch (c) {
    case Command::dot_solve: return "dot-solve";
    case Command::couplings: return "couplings";
    case Command::scan: return "scan";
    case Command::kraus: return "kraus";
    case Command::protocol: return "protocol";
    case Command::all: return "all";
  }
  return "?";
}

std::vector<double> scan_row(const JobResult& job) {
  if (!job.propagating) return {job.quoted_energy, 0.0, 0.0, 0.0, 0.0};
  return {job.quoted_energy, job.T[0], job.T[1], job.kraus.completeness_defect, job.kraus.leakage};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string echo_lines(const RunConfig& cfg, std::initializer_list<const char*> prefixes) {
  std::istringstream in(canonical_echo(cfg));
  std::string line, out;
  while (std::getline(in, line)) {
    for (const char* p : prefixes) {
      if (line.rfind(p, 0) == 0) {
        out += line + "\n";
        break;
      }
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << text;
  out.flush();
  require(static_cast<bool>(out), ErrorKind::io, "write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::io, "cannot create directory " + dir.string());
}

std::string block_tag(std::size_t i) { return "block" + std::to_string(i); }

Eigen::Matrix2cd pure(int j) {
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  rho(j, j) = 1.0;
  return rho;
}

}  // namespace

Pipeline::Pipeline(RunConfig cfg, PipelineOptions opts) : cfg_(std::move(cfg)), opts_(opts) {
  validate(cfg_);
}

void Pipeline::log(const std::string& line) const {
  if (opts_.log) *opts_.log << line << std::endl;
}

std::string Pipeline::dot_key() const {
  return sha256_hex(std::string("qpr-dot-") + artifact_version + "\n" +
                    echo_lines(cfg_, {"model.", "geometry.", "dot."}));
}

std::string Pipeline::coupling_key() const {
  return sha256_hex(dot_key() + "\n" +
                    echo_lines(cfg_, {"geometry.", "wire.grid_", "coupling."}));
}

std::string Pipeline::job_key(double quoted_energy, double spread) const {
  return sha256_hex(coupling_key() + "\n" +
                    echo_lines(cfg_, {"wire.transverse", "stepper.", "extraction."}) +
                    "energy = " + format_double(quoted_energy) + "\nspread = " + format_double(spread) +
                    "\n");
}

fs::path Pipeline::cache_path(const std::string& stage, const std::string& key) const {
  return cfg_.output_dir / "cache" / (stage + "-" + key.substr(0, 16) + ".qprs");
}

std::optional<Snapshot> Pipeline::load_cached(const std::string& stage, const std::string& key) {
  if (opts_.force) return std::nullopt;
  const fs::path path = cache_path(stage, key);
  if (!fs::exists(path)) return std::nullopt;
  try {
    Snapshot snap = read_snapshot(path);
    if (snap.key == key) return snap;
    log("cache: " + path.string() + " has a different key, recomputing");
  } catch (const Error& e) {
    log("cache: " + path.string() + " unusable (" + e.what() + "), recomputing");
  }
  return std::nullopt;
}

const ChannelSet& Pipeline::channels() {
  if (channels_) return *channels_;
  const std::string key = dot_key();
  if (auto snap = load_cached("dot", key)) {
    try {
      channels_ = channel_set_from(*snap);
      return *channels_;
    } catch (const Error& e) {
      log(std::string("cache: dot snapshot rejected (") + e.what() + ")");
    }
  }
  const auto t0 = Clock::now();
  const double h = cfg_.dot_grid.half_extent;
  const Grid2D grid = make_grid_2d(-h, h, cfg_.dot_grid.n, -h, h, cfg_.dot_grid.n);
  channels_ = build_qubit_basis(solve_dot_eigenstates(cfg_.geometry, cfg_.model(), grid, cfg_.dot));
  log("dot-solve: " + format_double(seconds_since(t0)) + " s");
  ensure_dir(cfg_.output_dir / "cache");
  write_snapshot(cache_path("dot", key), to_snapshot(*channels_, key));
  return *channels_;
}

const ChannelPotential& Pipeline::coupling() {
  if (coupling_) return *coupling_;
  const ChannelSet& set = channels();
  const std::string key = coupling_key();
  if (auto snap = load_cached("coupling", key)) {
    try {
      coupling_ = channel_potential_from(*snap);
      refinement_change_ = snap->get("refinement_change").at(0);
      return *coupling_;
    } catch (const std::exception& e) {
      log(std::string("cache: coupling snapshot rejected (") + e.what() + ")");
    }
  }
  const auto t0 = Clock::now();
  const double h = cfg_.wire_grid.half_extent;
  const Grid1D grid = make_grid(-h, h, cfg_.wire_grid.n);
  CouplingOptions copt = cfg_.coupling;
  copt.threads = cfg_.threads;
  const PhysicalModel model = cfg_.model();
  coupling_ = channel_coupling(set, grid, cfg_.geometry, model, copt);
  refinement_change_ =
      quadrature_refinement_change(set, grid, cfg_.geometry, model, copt.refinement_samples);
  log("couplings: " + format_double(seconds_since(t0)) + " s");
  Snapshot snap = to_snapshot(*coupling_, key);
  snap.add("refinement_change", {refinement_change_});
  ensure_dir(cfg_.output_dir / "cache");
  write_snapshot(cache_path("coupling", key), snap);
  return *coupling_;
}

double Pipeline::window_half_width() {
  if (window_) return *window_;
  window_ = cfg_.stepper.window_half_width > 0.0
                ? cfg_.stepper.window_half_width
                : interaction_half_width(coupling(), cfg_.geometry, cfg_.stepper.coupling_cut);
  return *window_;
}

JobResult Pipeline::compute_job(double quoted_energy, double spread) {
  JobResult r;
  r.quoted_energy = quoted_energy;
  r.spread = spread;
  r.wire_energy = quoted_energy - cfg_.transverse_energy;
  r.propagating = r.wire_energy > 0.0;
  if (!r.propagating) return r;
  const ChannelSet& set = channels();
  const ChannelPotential& pot = coupling();
  const double W = window_half_width();
  const PhysicalModel model = cfg_.model();
  const WavepacketSpec spec{r.wire_energy, spread};
  r.shape = packet_shape(spec, model, W);
  const std::vector<cplx> packet = make_wavepacket(spec, pot.grid, model, W);
  ChannelField out[2];
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pot.n_ch));
    c(0) = set.qubit_transform(0, j);
    c(1) = set.qubit_transform(1, j);
    ScatteringRun run = run_scattering(c, packet, pot, model, r.shape, W, cfg_.stepper);
    r.elapsed[j] = run.elapsed;
    r.window_probability[j] = run.window_probability;
    r.norm_drift[j] = run.norm_drift;
    r.trapped[j] = run.trapped;
    out[j] = std::move(run.field);
  }
  r.kraus = extract_kraus(out[0], out[1], packet, set.qubit_transform, cfg_.extraction);
  for (int j = 0; j < 2; ++j) {
    r.T[j] = transmission_coefficient(static_cast<std::size_t>(j), r.kraus);
    r.inelastic[j] = inelastic_fraction(static_cast<std::size_t>(j), r.kraus, r.shape);
  }
  return r;
}

namespace {

Snapshot job_snapshot(const JobResult& r, const std::string& key) {
  Snapshot s;
  s.key = key;
  s.add("job", {r.quoted_energy, r.spread, r.wire_energy, r.propagating ? 1.0 : 0.0});
  s.add("shape", {r.shape.k0, r.shape.sigma_k, r.shape.sigma_x, r.shape.x0});
  s.add("runs", {r.T[0], r.T[1], r.inelastic[0], r.inelastic[1], r.elapsed[0], r.elapsed[1],
                 r.window_probability[0], r.window_probability[1], r.norm_drift[0],
                 r.norm_drift[1], r.trapped[0] ? 1.0 : 0.0, r.trapped[1] ? 1.0 : 0.0});
  if (r.propagating) append_kraus(s, r.kraus);
  return s;
}

JobResult job_from(const Snapshot& s) {
  JobResult r;
  const auto& j = s.get("job");
  const auto& sh = s.get("shape");
  const auto& ru = s.get("runs");
  require(j.size() == 4 && sh.size() == 4 && ru.size() == 12, ErrorKind::integrity,
          "snapshot: malformed job sections");
  r.quoted_energy = j[0];
  r.spread = j[1];
  r.wire_energy = j[2];
  r.propagating = j[3] != 0.0;
  r.shape = {sh[0], sh[1], sh[2], sh[3]};
  for (int k = 0; k < 2; ++k) {
    r.T[k] = ru[0 + k];
    r.inelastic[k] = ru[2 + k];
    r.elapsed[k] = ru[4 + k];
    r.window_probability[k] = ru[6 + k];
    r.norm_drift[k] = ru[8 + k];
    r.trapped[k] = ru[10 + k] != 0.0;
  }
  if (r.propagating) r.kraus = kraus_from(s);
  return r;
}

}  // namespace

const JobResult& Pipeline::job(double quoted_energy, double spread) {
  return *jobs({{quoted_energy, spread}}).front();
}

std::vector<const JobResult*> Pipeline::jobs(const std::vector<std::pair<double, double>>& requests) {
  std::vector<std::pair<double, double>> missing;
  for (const auto& req : requests) {
    if (jobs_.count(req) || std::find(missing.begin(), missing.end(), req) != missing.end()) continue;
    const std::string key = job_key(req.first, req.second);
    if (auto snap = load_cached("job", key)) {
      try {
        jobs_.emplace(req, job_from(*snap));
        continue;
      } catch (const Error& e) {
        log(std::string("cache: job snapshot rejected (") + e.what() + ")");
      }
    }
    missing.push_back(req);
  }
  if (!missing.empty()) {
    bool any_propagating = false;
    for (const auto& m : missing) any_propagating = any_propagating || m.first > cfg_.transverse_energy;
    if (any_propagating) window_half_width();
    ensure_dir(cfg_.output_dir / "cache");
    std::vector<JobResult> results(missing.size());
    parallel_for(missing.size(), cfg_.threads, [&](std::size_t i) {
      const auto t0 = Clock::now();
      results[i] = compute_job(missing[i].first, missing[i].second);
      const std::string key = job_key(missing[i].first, missing[i].second);
      write_snapshot(cache_path("job", key), job_snapshot(results[i], key));
      if (results[i].propagating) {
        std::ostringstream msg;
        msg << "scatter: E = " << missing[i].first << " meV, dE = " << missing[i].second << ": "
            << std::fixed << std::setprecision(1) << seconds_since(t0) << " s";
        log(msg.str());
      }
    });
    for (std::size_t i = 0; i < missing.size(); ++i) {
      jobs_.emplace(missing[i], std::move(results[i]));
    }
  }
  std::vector<const JobResult*> out;
  for (const auto& req : requests) out.push_back(&jobs_.at(req));
  return out;
}

CsvTable Pipeline::scan_table() {
  std::vector<std::pair<double, double>> req;
  for (double e : cfg_.scan_energies) req.emplace_back(e, cfg_.scan_spread);
  CsvTable t;
  t.header = {"energy_meV", "T0", "T1", "defect", "leakage"};
  for (const JobResult* j : jobs(req)) t.rows.push_back(scan_row(*j));
  return t;
}

std::vector<BlockResult> Pipeline::protocol_results() {
  if (blocks_ready_) return blocks_;
  std::vector<std::pair<double, double>> req;
  for (const auto& b : cfg_.protocol_blocks) req.emplace_back(b.energy, b.spread);
  const auto results = jobs(req);
  const double rabi = channels().rabi_period;
  const PhysicalModel model = cfg_.model();
  blocks_.clear();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const JobResult& job = *results[i];
    BlockResult b;
    b.block = cfg_.protocol_blocks[i];
    const double v0 = 2.0 * model.kinetic_coeff * job.shape.k0;
    b.cycle_time = 2.0 * window_half_width() / v0;
    check_measurement_window(cfg_.n_cycles, b.cycle_time, rabi);
    const MeasurementMap map = build_povm(job.kraus);
    b.povm_defect = map.defect;
    b.policy = build_feedback_policy(job.kraus, cfg_.policy);
    for (const auto& w : map.warnings) log("protocol: " + w);
    for (const auto& w : b.policy.warnings) log("protocol: " + w);
    const BranchTree fb0 = simulate_protocol(pure(0), map, b.policy, cfg_.n_cycles);
    const BranchTree fb1 = simulate_protocol(pure(1), map, b.policy, cfg_.n_cycles);
    const BranchTree nf0 = simulate_protocol(pure(0), map, std::nullopt, cfg_.n_cycles);
    const BranchTree nf1 = simulate_protocol(pure(1), map, std::nullopt, cfg_.n_cycles);
    b.F_feedback = residual_uncertainty(fb0, fb1);
    b.F_nofeedback = residual_uncertainty(nf0, nf1);
    const auto d_fb = probability_defect(fb0, fb1);
    const auto d_nf = probability_defect(nf0, nf1);
    for (std::size_t n = 0; n < d_fb.size(); ++n) b.defect.push_back(std::max(d_fb[n], d_nf[n]));
    blocks_.push_back(std::move(b));
  }
  blocks_ready_ = true;
  return blocks_;
}

void Pipeline::run(Command command) {
  const auto t0 = Clock::now();
  ensure_dir(cfg_.output_dir);
  const fs::path& out = cfg_.output_dir;

  const ChannelSet& set = channels();
  {
    CsvTable t;
    t.header = {"index", "energy_meV", "residual"};
    for (std::size_t i = 0; i < set.size(); ++i) {
      t.rows.push_back({static_cast<double>(i), set.energies[i], set.residuals[i]});
    }
    write_csv(out / "dot_spectrum.csv", t);
  }
  if (command != Command::dot_solve) {
    write_csv(out / "couplings.csv", channel_potential_table(coupling()));
  }
  if (command == Command::scan || command == Command::all) {
    const auto t1 = Clock::now();
    write_csv(out / "scan.csv", scan_table());
    log("scan: " + format_double(seconds_since(t1)) + " s");
  }
  if (command == Command::kraus || command == Command::protocol || command == Command::all) {
    std::vector<std::pair<double, double>> req;
    for (const auto& b : cfg_.protocol_blocks) req.emplace_back(b.energy, b.spread);
    const auto results = jobs(req);
    for (std::size_t i = 0; i < results.size(); ++i) {
      write_csv(out / ("kraus_" + block_tag(i) + ".csv"), kraus_table(results[i]->kraus));
      Snapshot snap;
      snap.key = job_key(req[i].first, req[i].second);
      append_kraus(snap, results[i]->kraus);
      write_snapshot(out / ("kraus_" + block_tag(i) + ".qprs"), snap);
    }
  }
  if (command == Command::protocol || command == Command::all) {
    const auto t1 = Clock::now();
    const auto blocks = protocol_results();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      CsvTable t;
      t.header = {"n", "F_feedback", "F_nofeedback", "defect_accumulated"};
      for (std::size_t n = 0; n < blocks[i].F_feedback.size(); ++n) {
        t.rows.push_back({static_cast<double>(n + 1), blocks[i].F_feedback[n],
                          blocks[i].F_nofeedback[n], blocks[i].defect[n]});
      }
      write_csv(out / ("protocol_" + block_tag(i) + ".csv"), t);
    }
    log("protocol: " + format_double(seconds_since(t1)) + " s");
  }
  write_manifest(command);
  log(std::string(command_name(command)) + ": total " + format_double(seconds_since(t0)) + " s");
}

void Pipeline::write_manifest(Command command) {
  using nlohmann::json;
  json m;
  m["artifact"] = {{"name", "qpr"}, {"version", artifact_version}, {"snapshot_version", snapshot_version}};
  m["command"] = command_name(command);
  {
    json c = json::object();
    std::istringstream in(canonical_echo(cfg_));
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find(" = ");
      c[line.substr(0, eq)] = line.substr(eq + 3);
    }
    m["config"] = c;
    m["config_digest"] = sha256_hex(canonical_echo(cfg_));
  }
  const ChannelSet& set = channels();
  m["dot"] = {{"energies_meV", set.energies},
              {"max_residual", *std::max_element(set.residuals.begin(), set.residuals.end())},
              {"tunnel_splitting_meV", set.tunnel_splitting},
              {"rabi_period", set.rabi_period},
              {"one_localization", set.one_localization},
              {"cache_key", dot_key()}};
  if (command != Command::dot_solve) {
    coupling();
    m["couplings"] = {{"refinement_change", refinement_change_},
                      {"window_half_width_nm", window_half_width()},
                      {"cache_key", coupling_key()}};
  }
  auto job_json = [](const JobResult& j) {
    json o = {{"energy_meV", j.quoted_energy}, {"spread", j.spread}, {"wire_energy_meV", j.wire_energy},
              {"propagating", j.propagating}};
    if (j.propagating) {
      o["T"] = {j.T[0], j.T[1]};
      o["completeness_defect"] = j.kraus.completeness_defect;
      o["leakage"] = j.kraus.leakage;
      o["discarded"] = j.kraus.discarded;
      o["inelastic_fraction"] = {j.inelastic[0], j.inelastic[1]};
      o["propagation_time"] = {j.elapsed[0], j.elapsed[1]};
      o["final_window_probability"] = {j.window_probability[0], j.window_probability[1]};
      o["norm_drift"] = {j.norm_drift[0], j.norm_drift[1]};
      o["settled_remainder"] = {j.trapped[0], j.trapped[1]};
      o["lattice_points"] = j.kraus.size();
      o["packet"] = {{"k0", j.shape.k0}, {"sigma_k", j.shape.sigma_k}, {"sigma_x", j.shape.sigma_x},
                     {"x0", j.shape.x0}};
    }
    return o;
  };
  if (command == Command::scan || command == Command::all) {
    json rows = json::array();
    double max_defect = 0.0, max_contrast = 0.0;
    for (double e : cfg_.scan_energies) {
      const JobResult& j = job(e, cfg_.scan_spread);
      rows.push_back(job_json(j));
      if (j.propagating) {
        max_defect = std::max(max_defect, j.kraus.completeness_defect);
        max_contrast = std::max(max_contrast, std::abs(j.T[0] - j.T[1]));
      }
    }
    m["scan"] = {{"jobs", rows}, {"max_completeness_defect", max_defect}, {"max_contrast", max_contrast}};
  }
  if (command == Command::kraus || command == Command::protocol || command == Command::all) {
    json blocks = json::array();
    for (std::size_t i = 0; i < cfg_.protocol_blocks.size(); ++i) {
      const auto& b = cfg_.protocol_blocks[i];
      json o = job_json(job(b.energy, b.spread));
      o["tag"] = block_tag(i);
      blocks.push_back(o);
    }
    m["kraus"] = blocks;
  }
  if (command == Command::protocol || command == Command::all) {
    json blocks = json::array();
    const auto results = protocol_results();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& b = results[i];
      auto cm = [](const Eigen::Matrix2cd& a) {
        json rows = json::array();
        for (int r = 0; r < 2; ++r) {
          rows.push_back({{a(r, 0).real(), a(r, 0).imag()}, {a(r, 1).real(), a(r, 1).imag()}});
        }
        return rows;
      };
      blocks.push_back({{"tag", block_tag(i)},
                        {"energy_meV", b.block.energy},
                        {"spread", b.block.spread},
                        {"n_cycles", cfg_.n_cycles},
                        {"cycle_time", b.cycle_time},
                        {"povm_defect", b.povm_defect},
                        {"policy", {{"p0", b.policy.p0},
                                    {"V", cm(b.policy.V)},
                                    {"W_plus", cm(b.policy.W_plus)},
                                    {"W_minus", cm(b.policy.W_minus)},
                                    {"warnings", b.policy.warnings}}},
                        {"F_feedback", b.F_feedback},
                        {"F_nofeedback", b.F_nofeedback},
                        {"max_probability_defect",
                         *std::max_element(b.defect.begin(), b.defect.end())}});
    }
    m["protocol"] = blocks;
  }

  const fs::path& out = cfg_.output_dir;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), out);
    if (rel == "manifest.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json inventory = json::array();
  for (const auto& rel : files) {
    inventory.push_back({{"path", rel.generic_string()},
                         {"bytes", fs::file_size(out / rel)},
                         {"sha256", file_sha256(out / rel)}});
  }
  m["files"] = inventory;
  write_text(out / "manifest.json", m.dump(2) + "\n");
}

}  // namespace qpr
