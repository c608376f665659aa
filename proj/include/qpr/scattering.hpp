#pragma once

// Wavepacket scattering of the wire electron and extraction of the
// momentum-resolved measurement operators
//   A_p^{ij} = <i|<p| U |psi>|j>,
// rows i over all retained dot channels (qubit basis for i < 2), columns j
// over the two prepared qubit states.

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qpr/channel.hpp"
#include "qpr/dotsolver.hpp"
#include "qpr/grid.hpp"
#include "qpr/model.hpp"

namespace qpr {

struct WavepacketSpec {
  double mean_energy = 0.0;    ///< kinetic energy on the wire, meV
  double energy_spread = 0.0;  ///< std dev of the energy as a fraction of mean_energy
  /// Packet centre. NaN places it 7 sigma_x left of the interaction window.
  double launch_center = std::numeric_limits<double>::quiet_NaN();

  /// Throws ErrorKind::invalid_parameter unless E > 0 and 0 < dE < 0.2.
  void validate() const;
};

struct PacketShape {
  double k0 = 0.0;       ///< central wavenumber, nm^-1
  double sigma_k = 0.0;  ///< momentum std dev of the amplitude squared, nm^-1
  double sigma_x = 0.0;  ///< position std dev, nm
  double x0 = 0.0;       ///< resolved launch centre, nm
};

/// sigma_k = dE E / (2 K k), sigma_x = 1 / (2 sigma_k); k0 includes the
/// second-order correction k0^2 = E/K - sigma_k^2 so that <K k^2> = E.
PacketShape packet_shape(const WavepacketSpec& spec, const PhysicalModel& model,
                         double window_half_width);

/// Minimum-uncertainty Gaussian with unit norm on the grid.
/// Throws ErrorKind::invalid_parameter when k0 >= k_max / 2 and
/// ErrorKind::geometry when the packet does not fit between the left grid
/// edge and the interaction window.
std::vector<cplx> make_wavepacket(const WavepacketSpec& spec, const Grid1D& grid,
                                  const PhysicalModel& model, double window_half_width);

/// Spectral expectation <K k^2> of a field on its grid.
double kinetic_expectation(std::span<const cplx> psi, const Grid1D& grid, double kinetic_coeff);

struct ScatteringOptions {
  double dt = 4.0;               ///< hbar/meV
  double tol = 1e-10;            ///< Chebyshev truncation
  double max_time = 60000.0;     ///< hbar/meV
  double stop_fraction = 1e-6;   ///< window probability that ends the run
  /// A window probability below trapped_fraction that changes by less than
  /// settle_change over one window transit time also ends the run; the
  /// remainder sits in long-lived resonances. So does reaching the grid edge
  /// while the window probability is below trapped_fraction.
  double trapped_fraction = 1e-3;
  double settle_change = 0.05;
  double edge_fraction = 1e-8;   ///< grid-edge probability that ends or aborts the run
  double edge_width = 0.02;      ///< width of each edge zone as a fraction of the grid
  double window_half_width = 0;  ///< <= 0: derived from the geometry and couplings
  double coupling_cut = 1e-3;    ///< relative level defining the coupling region
  std::size_t max_terms = 20000;
};

/// Half-width of the region outside which the packet counts as separated:
/// max(r + 5 s, largest |x| where an off-diagonal element or a diagonal
/// difference exceeds coupling_cut times its peak).
double interaction_half_width(const ChannelPotential& potential, const DeviceGeometry& geom,
                              double coupling_cut);

struct ScatteringRun {
  ChannelField field;
  double elapsed = 0.0;           ///< physical time
  std::size_t steps = 0;
  std::size_t operator_applications = 0;
  double window_probability = 0.0;
  double max_edge_probability = 0.0;
  double norm_drift = 0.0;        ///< |norm - initial norm| at the end
  bool trapped = false;           ///< ended with a remainder below trapped_fraction
};

/// Propagates amplitudes (channel vector `initial`) x packet until, after
/// the packet centre has reached the window, the window probability drops
/// below stop_fraction, or settles below trapped_fraction, or is below
/// trapped_fraction when the outgoing waves reach the grid edge. Throws
/// ErrorKind::geometry on edge density with a larger remainder and
/// ErrorKind::timeout when max_time passes first.
ScatteringRun run_scattering(const Eigen::VectorXd& initial, std::span<const cplx> packet,
                             const ChannelPotential& potential, const PhysicalModel& model,
                             const PacketShape& shape, double window_half_width,
                             const ScatteringOptions& opts);

struct KrausSet {
  std::size_t n_ch = 0;
  std::vector<double> p;                ///< ascending, nm^-1
  std::vector<double> weight;           ///< lattice spacing dp
  std::vector<Eigen::MatrixXcd> A;      ///< n_ch x 2 each
  std::vector<double> incident;         ///< |<p|psi>|^2
  double p0 = 0.0;                      ///< argmax of the incident spectrum
  double completeness_defect = 0.0;     ///< ||sum dp A^H A - I||_2
  double leakage = 0.0;                 ///< largest population of channels >= 2
  double discarded = 0.0;               ///< norm on dropped lattice points

  std::size_t size() const { return p.size(); }
  /// Index of the lattice point closest to p.
  std::size_t nearest(double p) const;
};

struct ExtractionOptions {
  double discard_fraction = 1e-8;
  double max_defect = 1e-2;
};

/// Fourier projection of the two final fields; rows 0, 1 are rotated from
/// the dot-energy basis into the qubit basis with `qubit_transform`.
/// Throws ErrorKind::extraction when the completeness defect exceeds max_defect.
KrausSet extract_kraus(const ChannelField& run0, const ChannelField& run1,
                       std::span<const cplx> packet, const Eigen::Matrix2d& qubit_transform,
                       const ExtractionOptions& opts = {});

/// sum_{p > 0} dp Tr[A_p^H A_p |j><j|].
double transmission_coefficient(std::size_t j, const KrausSet& kraus);

/// Outgoing norm of prepared state j outside the elastic bands: population
/// of channels >= 2 plus qubit-channel weight with ||p| - k0| beyond
/// band_sigmas * sigma_k. The doublet splitting is far below sigma_k, so
/// both qubit rows share one band.
double inelastic_fraction(std::size_t j, const KrausSet& kraus, const PacketShape& shape,
                          double band_sigmas = 3.0);

/// Largest relative deviation of |A_p^{ij}| / |<|p| |psi>| from its value at
/// the lattice point nearest p_centre, over |p - p_centre| <= half_band.
/// Reflected momenta are compared with the incident amplitude at -p.
double factorization_spread(const KrausSet& kraus, std::size_t i, std::size_t j,
                            double p_centre, double half_band);

}  // namespace qpr
