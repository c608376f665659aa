#include "qpr/chebyshev.hpp"

#include <algorithm>
#include <string>

namespace qpr {

std::vector<double> real_time_coefficients(double alpha, double tol, std::size_t max_terms) {
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorKind::invalid_parameter,
          "chebyshev: alpha must be finite");
  const auto first = static_cast<std::size_t>(std::ceil(alpha));
  std::size_t span = first + 32 + static_cast<std::size_t>(12.0 * std::cbrt(alpha + 1.0));
  for (;;) {
    const std::size_t top = std::min(span, max_terms + 8);
    const auto j = bessel_j_sequence(alpha, top);
    for (std::size_t n = first; n + 4 <= top; ++n) {
      const double an = (n == 0 ? 1.0 : 2.0) * j[n];
      if (std::abs(an) < tol) {
        const std::size_t count = n + 1 + 4;
        if (count > max_terms) break;
        std::vector<double> a(count);
        a[0] = j[0];
        for (std::size_t k = 1; k < count; ++k) a[k] = 2.0 * j[k];
        return a;
      }
    }
    if (top >= max_terms + 8) {
      fail(ErrorKind::step_size,
           "chebyshev: expansion needs more than " + std::to_string(max_terms) +
               " terms (alpha = " + std::to_string(alpha) + "); reduce dt");
    }
    span *= 2;
  }
}

std::vector<double> imaginary_time_coefficients(double alpha, double tol,
                                                std::size_t max_terms, double scale) {
  require(alpha >= 0.0 && std::isfinite(alpha), ErrorKind::invalid_parameter,
          "chebyshev: alpha must be finite");
  std::size_t span = 32 + static_cast<std::size_t>(10.0 * std::sqrt(alpha));
  for (;;) {
    const std::size_t top = std::min(span, max_terms + 8);
    const auto ie = scaled_bessel_i_sequence(alpha, top);
    for (std::size_t n = 0; n + 4 <= top; ++n) {
      const double cn = scale * (n == 0 ? 1.0 : 2.0) * ie[n];
      if (n > 0 && cn < tol) {
        const std::size_t count = n + 1 + 4;
        if (count > max_terms) break;
        std::vector<double> c(count);
        for (std::size_t k = 0; k < count; ++k) {
          const double sign = (k % 2 == 0) ? 1.0 : -1.0;
          c[k] = scale * sign * (k == 0 ? 1.0 : 2.0) * ie[k];
        }
        return c;
      }
    }
    if (top >= max_terms + 8) {
      fail(ErrorKind::step_size, "chebyshev: imaginary-time expansion needs more than " +
                                     std::to_string(max_terms) + " terms");
    }
    span *= 2;
  }
}

}  // namespace qpr
