#pragma once

// Physical constants, unit system and analytic device potentials.
//
// Units: lengths in nm, energies in meV, time in hbar/meV (about 0.6582 ps).
// hbar is 1 in these units, so a phase accumulates as E * t.

namespace qpr {

namespace constants {
/// hbar^2 / (2 m_e) in meV nm^2 (CODATA 2018).
inline constexpr double hbar2_over_2me = 38.09982120;
/// e^2 / (4 pi eps0) in meV nm (CODATA 2018).
inline constexpr double coulomb_vacuum = 1439.964548;
/// hbar in meV ps; converts internal time units to picoseconds.
inline constexpr double hbar_meV_ps = 0.6582119569;
}  // namespace constants

struct PhysicalModel {
  double m_star_rel = 0.0;
  double epsilon_r = 0.0;
  double kinetic_coeff = 0.0;  ///< K = hbar^2/(2 m*), meV nm^2
  double coulomb_coeff = 0.0;  ///< C = e^2/(4 pi eps), meV nm
};

/// Throws ErrorKind::invalid_parameter on non-positive arguments.
PhysicalModel build_physical_model(double m_star_rel, double epsilon_r);

/// GaAs/AlGaAs values: m* = 0.0667 m_e, eps = 12.9 eps0.
PhysicalModel gaas_model();

struct DeviceGeometry {
  double y_c = 143.0;        ///< dot centre offset, nm
  double V0 = 5.99;          ///< dot depth, meV
  double hbar_omega = 0.818; ///< dot confinement quantum, meV
  double v_x = 1.09;         ///< barrier height, meV
  double r = 143.0;          ///< barrier centre offset, nm
  double s = 81.9;           ///< barrier width, nm
  double d = 287.0;          ///< wire to dot-pair centre distance, nm
  double wire_half_width = 2.0;  ///< Coulomb softening length, nm

  /// Throws ErrorKind::invalid_parameter when a length or energy is out of range.
  void validate() const;
};

/// Shipped double-dot and resonant-barrier parameter set.
DeviceGeometry shipped_geometry();

/// Exponent prefactor of the Gaussian wells, (hbar omega)^2 / (4 K V0), nm^-2.
double dot_well_prefactor(const DeviceGeometry& geom, const PhysicalModel& model);

/// Oscillator length sqrt(2K / hbar omega) of one well in harmonic approximation.
double dot_oscillator_length(const DeviceGeometry& geom, const PhysicalModel& model);

double dot_potential(double x1, double y1, const DeviceGeometry& geom,
                     const PhysicalModel& model);

/// Longitudinal double sech^2 barrier of the wire.
double wire_potential(double x2, const DeviceGeometry& geom);

}  // namespace qpr
