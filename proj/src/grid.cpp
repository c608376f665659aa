#include "qpr/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "qpr/error.hpp"

namespace qpr {

double Grid1D::k(std::size_t j) const {
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
  const auto jj = static_cast<long long>(j);
  const auto nn = static_cast<long long>(n);
  return base * static_cast<double>(jj < nn / 2 ? jj : jj - nn);
}

double Grid1D::k_max() const { return std::numbers::pi / dx; }

double Grid1D::dk() const { return 2.0 * std::numbers::pi / (static_cast<double>(n) * dx); }

std::vector<double> Grid1D::positions() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
  return out;
}

std::vector<double> Grid1D::wavenumbers() const {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = k(j);
  return out;
}

Grid1D make_grid(double x_min, double x_max, std::size_t n) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
          ErrorKind::invalid_parameter, "grid: need x_max > x_min");
  require(n >= 8 && std::has_single_bit(n), ErrorKind::invalid_parameter,
          "grid: point count must be a power of two >= 8");
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.dx = (x_max - x_min) / static_cast<double>(n);
  return g;
}

Grid2D make_grid_2d(double x_min, double x_max, std::size_t nx, double y_min,
                    double y_max, std::size_t ny) {
  return Grid2D{make_grid(x_min, x_max, nx), make_grid(y_min, y_max, ny)};
}

}  // namespace qpr
