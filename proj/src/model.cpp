#include "qpr/model.hpp"

#include <cmath>
#include <string>

#include "qpr/error.hpp"

namespace qpr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::shape: return "shape";
    case ErrorKind::step_size: return "step-size";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::basis_construction: return "basis-construction";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::representation: return "representation";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::timeout: return "timeout";
    case ErrorKind::extraction: return "extraction";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::integrity: return "integrity";
  }
  return "unknown";
}

PhysicalModel build_physical_model(double m_star_rel, double epsilon_r) {
  require(m_star_rel > 0.0 && std::isfinite(m_star_rel), ErrorKind::invalid_parameter,
          "effective mass must be positive");
  require(epsilon_r > 0.0 && std::isfinite(epsilon_r), ErrorKind::invalid_parameter,
          "relative permittivity must be positive");
  PhysicalModel m;
  m.m_star_rel = m_star_rel;
  m.epsilon_r = epsilon_r;
  m.kinetic_coeff = constants::hbar2_over_2me / m_star_rel;
  m.coulomb_coeff = constants::coulomb_vacuum / epsilon_r;
  return m;
}

PhysicalModel gaas_model() { return build_physical_model(0.0667, 12.9); }

void DeviceGeometry::validate() const {
  auto positive = [](double v, const char* name) {
    require(v > 0.0 && std::isfinite(v), ErrorKind::invalid_parameter,
            std::string("geometry: ") + name + " must be positive");
  };
  positive(y_c, "y_c");
  positive(V0, "V0");
  positive(hbar_omega, "hbar_omega");
  positive(v_x, "v_x");
  positive(r, "r");
  positive(s, "s");
  positive(d, "d");
  require(wire_half_width >= 0.0 && std::isfinite(wire_half_width),
          ErrorKind::invalid_parameter, "geometry: wire_half_width must be >= 0");
  require(d > y_c, ErrorKind::invalid_parameter,
          "geometry: the wire must lie outside the dot pair (d > y_c)");
}

DeviceGeometry shipped_geometry() { return DeviceGeometry{}; }

double dot_well_prefactor(const DeviceGeometry& geom, const PhysicalModel& model) {
  return geom.hbar_omega * geom.hbar_omega / (4.0 * model.kinetic_coeff * geom.V0);
}

double dot_oscillator_length(const DeviceGeometry& geom, const PhysicalModel& model) {
  return std::sqrt(2.0 * model.kinetic_coeff / geom.hbar_omega);
}

double dot_potential(double x1, double y1, const DeviceGeometry& geom,
                     const PhysicalModel& model) {
  const double a = dot_well_prefactor(geom, model);
  const double x2 = x1 * x1;
  const double up = y1 - geom.y_c;
  const double dn = y1 + geom.y_c;
  return -geom.V0 * (std::exp(-a * (x2 + up * up)) + std::exp(-a * (x2 + dn * dn)));
}

double wire_potential(double x2, const DeviceGeometry& geom) {
  const double a = std::cosh((x2 - geom.r) / geom.s);
  const double b = std::cosh((x2 + geom.r) / geom.s);
  // cosh overflows to inf far out; 1/inf^2 is 0 which is the right limit.
  return geom.v_x / (a * a) + geom.v_x / (b * b);
}

}  // namespace qpr
