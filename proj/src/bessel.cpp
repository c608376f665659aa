#include "qpr/bessel.hpp"

#include <cmath>

#include "qpr/error.hpp"

namespace qpr {
namespace {

constexpr double kBig = 1e250;
constexpr double kSmall = 1e-250;

}  // namespace

std::vector<double> bessel_j_sequence(double x, std::size_t nmax) {
  require(std::isfinite(x) && x >= 0.0, ErrorKind::invalid_parameter,
          "bessel_j: argument must be finite and non-negative");
  std::vector<double> out(nmax + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double top = std::max(static_cast<double>(nmax), x);
  auto start = static_cast<std::size_t>(top + 40.0 + 12.0 * std::cbrt(x));
  start += start % 2;  // even so the normalisation sum closes on J_0

  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-30;
  for (std::size_t n = start; n >= 1; --n) {
    j[n - 1] = (2.0 * static_cast<double>(n) / x) * j[n] - j[n + 1];
    if (std::abs(j[n - 1]) > kBig) {
      for (std::size_t m = n - 1; m <= start + 1; ++m) j[m] *= kSmall;
    }
  }
  double norm = j[0];
  for (std::size_t n = 2; n <= start; n += 2) norm += 2.0 * j[n];
  for (std::size_t n = 0; n <= nmax; ++n) out[n] = j[n] / norm;
  return out;
}

std::vector<double> scaled_bessel_i_sequence(double x, std::size_t nmax) {
  require(std::isfinite(x) && x >= 0.0, ErrorKind::invalid_parameter,
          "bessel_i: argument must be finite and non-negative");
  std::vector<double> out(nmax + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double top = std::max(static_cast<double>(nmax), 10.0 * std::sqrt(x));
  const auto start = static_cast<std::size_t>(top + 40.0);

  std::vector<double> v(start + 2, 0.0);
  v[start] = 1e-30;
  for (std::size_t n = start; n >= 1; --n) {
    v[n - 1] = v[n + 1] + (2.0 * static_cast<double>(n) / x) * v[n];
    if (v[n - 1] > kBig) {
      for (std::size_t m = n - 1; m <= start + 1; ++m) v[m] *= kSmall;
    }
  }
  double norm = v[0];
  for (std::size_t n = 1; n <= start; ++n) norm += 2.0 * v[n];
  for (std::size_t n = 0; n <= nmax; ++n) out[n] = v[n] / norm;
  return out;
}

}  // namespace qpr
