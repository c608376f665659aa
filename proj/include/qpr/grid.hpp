#pragma once

#include <cstddef>
#include <vector>

namespace qpr {

/// Uniform periodic grid: x_i = x_min + i dx for i in [0, n), with x_max
/// identified with x_min. Momenta follow FFT ordering.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n = 0;
  double dx = 0.0;

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  /// Wavenumber of FFT bin j (nm^-1).
  double k(std::size_t j) const;
  double k_max() const;
  /// Momentum lattice spacing 2 pi / (n dx).
  double dk() const;
  std::vector<double> positions() const;
  std::vector<double> wavenumbers() const;

  bool operator==(const Grid1D&) const = default;
};

struct Grid2D {
  Grid1D x;
  Grid1D y;

  std::size_t size() const { return x.n * y.n; }
  double cell_area() const { return x.dx * y.dx; }
  /// Row-major with y fastest: index = ix * ny + iy.
  std::size_t index(std::size_t ix, std::size_t iy) const { return ix * y.n + iy; }

  bool operator==(const Grid2D&) const = default;
};

/// Throws ErrorKind::invalid_parameter unless x_max > x_min and n is a power
/// of two no smaller than 8.
Grid1D make_grid(double x_min, double x_max, std::size_t n);

Grid2D make_grid_2d(double x_min, double x_max, std::size_t nx, double y_min,
                    double y_max, std::size_t ny);

}  // namespace qpr
