#pragma once

// Channel reduction of the dot-wire Coulomb interaction. The wire electron
// sits on the line y2 = -d, so for each wire point
//   V_ij(x2) = C sum_r1 phi_i(r1) phi_j(r1) / sqrt((x1 - x2)^2 + (y1 + d)^2 + dy^2) dA.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "qpr/channel.hpp"
#include "qpr/csv.hpp"
#include "qpr/dotsolver.hpp"
#include "qpr/grid.hpp"
#include "qpr/model.hpp"

namespace qpr {

struct CouplingOptions {
  /// Dot points whose summed density is below this fraction of the peak are skipped.
  double prune_fraction = 1e-14;
  /// Relative change allowed between the full and the half-resolution quadrature.
  double refinement_tol = 1e-2;
  /// Wire points used for the refinement check.
  std::size_t refinement_samples = 64;
  std::size_t threads = 1;
};

/// Coulomb matrix elements only, without wire potential or dot energies.
/// Result is tagged with the dot-energy basis.
ChannelPotential coulomb_matrix(const ChannelSet& channels, const Grid1D& grid,
                                const DeviceGeometry& geom, const PhysicalModel& model,
                                const CouplingOptions& opts = {});

/// Full channel potential: V_ij + (V_wire + E_i) delta_ij.
/// Throws ErrorKind::invalid_parameter when the grid does not reach the
/// Coulomb far field and ErrorKind::accuracy when the quadrature is not
/// converged under refinement.
ChannelPotential channel_coupling(const ChannelSet& channels, const Grid1D& grid,
                                  const DeviceGeometry& geom, const PhysicalModel& model,
                                  const CouplingOptions& opts = {});

/// Largest relative change of the sampled V_ij when every other dot point
/// is dropped in both directions (cell area scaled by four).
double quadrature_refinement_change(const ChannelSet& channels, const Grid1D& grid,
                                    const DeviceGeometry& geom, const PhysicalModel& model,
                                    std::size_t samples);

/// Replaces the leading 2x2 block by T^T V T at every grid point; T holds the
/// target basis vectors as columns, expanded in the `from` basis. The result
/// carries the other tag. Throws ErrorKind::representation when the
/// potential is not tagged `from`.
ChannelPotential rotate_basis(const ChannelPotential& potential, const Eigen::Matrix2d& transform,
                              Basis from);

/// Columns x_nm, then V_i_j for i <= j.
CsvTable channel_potential_table(const ChannelPotential& potential);

}  // namespace qpr
