#pragma once

// Stage orchestration: dot -> couplings -> scattering jobs -> Kraus sets ->
// protocol. Every stage result is cached under <out>/cache keyed by the
// SHA-256 of the settings it depends on; a missing, stale or corrupt
// snapshot is recomputed.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpr/channel.hpp"
#include "qpr/config.hpp"
#include "qpr/csv.hpp"
#include "qpr/dotsolver.hpp"
#include "qpr/protocol.hpp"
#include "qpr/scattering.hpp"
#include "qpr/snapshot.hpp"

namespace qpr {

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

inline constexpr const char* artifact_version = "1.0.0";

enum class Command { dot_solve, couplings, scan, kraus, protocol, all };

/// Throws ErrorKind::config for an unknown name.
Command parse_command(const std::string& name);
const char* command_name(Command c);

struct JobResult {
  double quoted_energy = 0.0;
  double spread = 0.0;
  double wire_energy = 0.0;  ///< quoted minus transverse energy
  bool propagating = false;  ///< false when the wire energy is not positive
  PacketShape shape;
  KrausSet kraus;
  double T[2] = {0.0, 0.0};
  double inelastic[2] = {0.0, 0.0};
  double elapsed[2] = {0.0, 0.0};
  double window_probability[2] = {0.0, 0.0};
  double norm_drift[2] = {0.0, 0.0};
  bool trapped[2] = {false, false};
};

struct BlockResult {
  ProtocolBlock block;
  double cycle_time = 0.0;
  FeedbackPolicy policy;
  double povm_defect = 0.0;
  std::vector<double> F_feedback;
  std::vector<double> F_nofeedback;
  std::vector<double> defect;  ///< probability bookkeeping defect per depth
};

struct PipelineOptions {
  bool force = false;       ///< ignore cached snapshots
  std::ostream* log = nullptr;  ///< progress and wall times; null for silence
};

class Pipeline {
 public:
  Pipeline(RunConfig cfg, PipelineOptions opts = {});

  const RunConfig& config() const { return cfg_; }
  const std::filesystem::path& output_dir() const { return cfg_.output_dir; }

  const ChannelSet& channels();
  /// Dot-energy basis, wire potential and dot energies on the diagonal.
  const ChannelPotential& coupling();
  double window_half_width();

  /// Scattering of both prepared states at one quoted energy.
  const JobResult& job(double quoted_energy, double spread);
  /// Runs every missing job in parallel; results in input order.
  std::vector<const JobResult*> jobs(const std::vector<std::pair<double, double>>& requests);

  /// Columns energy_meV, T0, T1, defect, leakage.
  CsvTable scan_table();
  std::vector<BlockResult> protocol_results();

  /// Computes what the command needs and writes its CSVs, snapshots and
  /// manifest.json into the output directory.
  void run(Command command);

 private:
  std::string dot_key() const;
  std::string coupling_key() const;
  std::string job_key(double quoted_energy, double spread) const;
  std::filesystem::path cache_path(const std::string& stage, const std::string& key) const;
  std::optional<Snapshot> load_cached(const std::string& stage, const std::string& key);
  JobResult compute_job(double quoted_energy, double spread);
  void write_manifest(Command command);
  void log(const std::string& line) const;

  RunConfig cfg_;
  PipelineOptions opts_;
  std::optional<ChannelSet> channels_;
  std::optional<ChannelPotential> coupling_;
  double refinement_change_ = 0.0;
  std::optional<double> window_;
  std::map<std::pair<double, double>, JobResult> jobs_;
  std::vector<BlockResult> blocks_;
  bool blocks_ready_ = false;
};

/// Builds the scan row for one job: T = 0 and zero diagnostics when the
/// wire energy is not positive.
std::vector<double> scan_row(const JobResult& job);

}  // namespace qpr
