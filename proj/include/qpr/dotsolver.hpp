#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "qpr/chebyshev.hpp"
#include "qpr/fft.hpp"
#include "qpr/grid.hpp"
#include "qpr/model.hpp"

namespace qpr {

/// -K laplacian + V_dot on a periodic 2D grid, kinetic term applied spectrally.
class DotHamiltonian {
 public:
  DotHamiltonian(const Grid2D& grid, const DeviceGeometry& geom, const PhysicalModel& model);

  std::size_t size() const { return grid_.size(); }
  const Grid2D& grid() const { return grid_; }
  std::span<const double> potential() const { return potential_; }

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  /// Kinetic part only.
  void apply_kinetic(std::span<const cplx> in, std::span<cplx> out) const;
  SpectralBounds bounds() const;

 private:
  Grid2D grid_;
  double kinetic_;
  std::vector<double> potential_;
  std::vector<double> k2_;
  FftPlan plan_;
  mutable std::vector<cplx> scratch_;
};

struct ChannelSet {
  Grid2D grid;
  std::vector<double> energies;                   ///< ascending, meV
  std::vector<std::vector<double>> eigenfunctions;  ///< real, unit L2 norm on the grid
  std::vector<double> residuals;                  ///< ||H phi - E phi||
  /// Columns are |0>, |1> expanded in {phi_0, phi_1}. Real orthogonal.
  Eigen::Matrix2d qubit_transform = Eigen::Matrix2d::Identity();
  bool has_qubit_basis = false;
  double tunnel_splitting = 0.0;  ///< E_1 - E_0
  double rabi_period = 0.0;       ///< 2 pi / (E_1 - E_0), hbar/meV
  double one_localization = 0.0;  ///< probability of |1> in y1 < 0

  std::size_t size() const { return energies.size(); }
};

struct DotSolverOptions {
  std::size_t n_states = 4;
  std::size_t block_per_parity = 6;
  double tau = 3.0;               ///< imaginary time per subspace iteration
  double chebyshev_tol = 1e-14;
  double residual_tol = 1e-6;     ///< relative to |E_i|
  std::size_t max_iterations = 150;
};

/// Lowest eigenpairs of the double dot by blocked imaginary-time Chebyshev
/// filtering with Gram-Schmidt orthonormalisation and Rayleigh-Ritz, run
/// separately in the two y1-parity sectors. Eigenfunctions are real with
/// phi_0 and phi_1 positive at (0, -y_c).
/// Throws ErrorKind::invalid_parameter when the grid is too small and
/// ErrorKind::convergence when the iteration cap is reached.
ChannelSet solve_dot_eigenstates(const DeviceGeometry& geom, const PhysicalModel& model,
                                 const Grid2D& grid, const DotSolverOptions& opts = {});

/// |0> = (phi_0 - phi_1)/sqrt2, |1> = (phi_0 + phi_1)/sqrt2, |1> on the wire side.
/// Throws ErrorKind::basis_construction if |1> is less than 95 % localised.
ChannelSet build_qubit_basis(ChannelSet set);

/// Probability of the normalised real field in the half plane y < 0.
double lower_half_probability(const Grid2D& grid, std::span<const double> phi);

/// Deviation of phi from y -> -y parity `sign` (+1 even, -1 odd), L2 norm.
double parity_defect(const Grid2D& grid, std::span<const double> phi, int sign);

/// Kinetic and potential expectation values of a normalised real field.
std::pair<double, double> kinetic_potential_expectation(const DotHamiltonian& h,
                                                        std::span<const double> phi);

}  // namespace qpr
