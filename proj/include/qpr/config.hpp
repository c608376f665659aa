#pragma once

// Run configuration: INI-style `key = value` lines grouped under
// `[section]` headers, `#` or `;` starting a comment. Every key has a
// default; unknown sections and keys are rejected.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "qpr/coupling.hpp"
#include "qpr/dotsolver.hpp"
#include "qpr/model.hpp"
#include "qpr/protocol.hpp"
#include "qpr/scattering.hpp"

namespace qpr {

struct GridSpec {
  double half_extent = 0.0;  ///< grid covers [-half_extent, half_extent)
  std::size_t n = 0;
};

struct ProtocolBlock {
  double energy = 0.0;  ///< quoted incident energy, meV
  double spread = 0.0;  ///< fraction of the longitudinal energy
};

struct RunConfig {
  double m_star_rel = 0.0667;
  double epsilon_r = 12.9;
  DeviceGeometry geometry;

  GridSpec dot_grid{512.0, 256};
  DotSolverOptions dot;

  GridSpec wire_grid{262144.0, 32768};
  CouplingOptions coupling;

  /// Quoted incident energies include the transverse wire-mode energy;
  /// the packet carries E - transverse_energy along the wire.
  double transverse_energy = 15.03;

  ScatteringOptions stepper;
  ExtractionOptions extraction;

  std::vector<double> scan_energies;  ///< quoted energies, ascending
  double scan_spread = 0.02;

  std::vector<ProtocolBlock> protocol_blocks;
  std::size_t n_cycles = 10;
  PolicyVariant policy = PolicyVariant::rotate_once;

  std::filesystem::path output_dir = "out";
  std::size_t threads = 1;

  PhysicalModel model() const { return build_physical_model(m_star_rel, epsilon_r); }
};

/// Defaults: shipped geometry, scan 10..20 meV in 0.2 meV steps, protocol
/// blocks 16.4 meV x {2, 2.8, 4.2} % and 17.6 meV x 2 %.
RunConfig default_config();

/// Throws ErrorKind::config with a line number on any syntax error,
/// unknown section or key, or unparsable value; then validates.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks every module precondition that can be decided before compute.
/// Throws ErrorKind::config.
void validate(const RunConfig& cfg);

/// Canonical `section.key = value` listing of every setting except the
/// output directory and thread count (which do not affect results).
std::string canonical_echo(const RunConfig& cfg);

/// Energies lo, lo + step, ... <= hi, each rounded to 1e-9 meV.
std::vector<double> energy_range(double lo, double hi, double step);

}  // namespace qpr
