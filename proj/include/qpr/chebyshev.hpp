#pragma once

// Chebyshev expansions of exp(-i H dt) and exp(-H tau) for any Hermitian
// operator exposed through `size()` and `apply(in, out)` (out = H in).
//
// The operator is mapped onto [-1, 1] with
//   Hn = (2H - (E_u + E_l)) / (E_u - E_l),   alpha = (E_u - E_l) dt / 2,
// and the propagator is expanded as
//   exp(-i H dt) = exp(-i (E_u + E_l) dt / 2) sum_n a_n(alpha) T_n(-i Hn),
//   a_0 = J_0(alpha), a_n = 2 J_n(alpha).

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "qpr/bessel.hpp"
#include "qpr/error.hpp"
#include "qpr/fft.hpp"

namespace qpr {

struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;

  double centre() const { return 0.5 * (upper + lower); }
  double half_width() const { return 0.5 * (upper - lower); }
};

template <class Op>
concept HermitianOperator = requires(const Op& op, std::span<const cplx> in, std::span<cplx> out) {
  { op.size() } -> std::convertible_to<std::size_t>;
  op.apply(in, out);
};

struct ChebyshevStats {
  std::size_t terms = 0;  ///< number of operator applications
  double alpha = 0.0;
};

/// Real-time coefficients a_0..a_N. N is the smallest index >= ceil(alpha)
/// with |a_N| < tol, plus four guard terms. Throws ErrorKind::step_size when
/// N exceeds `max_terms`.
std::vector<double> real_time_coefficients(double alpha, double tol, std::size_t max_terms);

/// Coefficients of scale * exp(-alpha (1 + x)) on [-1, 1]:
/// c_n = scale (2 - delta_n0) (-1)^n exp(-alpha) I_n(alpha), cut at the first
/// |c_n| < tol plus four guard terms.
std::vector<double> imaginary_time_coefficients(double alpha, double tol,
                                                std::size_t max_terms, double scale = 1.0);

/// Scratch vectors reused across steps of one propagation run.
struct ChebyshevWorkspace {
  std::vector<cplx> prev, curr, next, acc;

  void resize(std::size_t n) {
    prev.resize(n);
    curr.resize(n);
    next.resize(n);
    acc.resize(n);
  }
};

namespace detail {

/// out = Hn in, Hn the operator scaled onto [-1, 1].
template <HermitianOperator Op>
void apply_normalised(const Op& op, const SpectralBounds& b, std::span<const cplx> in,
                      std::span<cplx> out) {
  op.apply(in, out);
  const double c = b.centre();
  const double inv = 1.0 / b.half_width();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - c * in[i]) * inv;
}

}  // namespace detail

/// One step state <- exp(-i H dt) state.
template <HermitianOperator Op>
ChebyshevStats chebyshev_step(const Op& op, const SpectralBounds& bounds, double dt,
                              double tol, std::span<cplx> state, ChebyshevWorkspace& ws,
                              std::size_t max_terms = 20000) {
  require(dt > 0.0, ErrorKind::invalid_parameter, "chebyshev: dt must be positive");
  require(tol > 0.0 && tol < 1.0, ErrorKind::invalid_parameter,
          "chebyshev: tol must lie in (0, 1)");
  require(bounds.upper > bounds.lower, ErrorKind::invalid_parameter,
          "chebyshev: empty spectral bounds");
  require(state.size() == op.size(), ErrorKind::shape, "chebyshev: state size mismatch");

  const double alpha = bounds.half_width() * dt;
  const auto a = real_time_coefficients(alpha, tol, max_terms);
  const std::size_t n = state.size();
  ws.resize(n);
  constexpr cplx minus_i(0.0, -1.0);

  // phi_0 = psi, phi_1 = -i Hn psi, phi_{k+1} = -2i Hn phi_k + phi_{k-1}
  for (std::size_t i = 0; i < n; ++i) {
    ws.prev[i] = state[i];
    ws.acc[i] = a[0] * state[i];
  }
  if (a.size() > 1) {
    detail::apply_normalised(op, bounds, ws.prev, ws.curr);
    for (std::size_t i = 0; i < n; ++i) {
      ws.curr[i] *= minus_i;
      ws.acc[i] += a[1] * ws.curr[i];
    }
  }
  for (std::size_t k = 2; k < a.size(); ++k) {
    detail::apply_normalised(op, bounds, ws.curr, ws.next);
    for (std::size_t i = 0; i < n; ++i) {
      ws.next[i] = 2.0 * minus_i * ws.next[i] + ws.prev[i];
      ws.acc[i] += a[k] * ws.next[i];
    }
    std::swap(ws.prev, ws.curr);
    std::swap(ws.curr, ws.next);
  }
  const cplx phase = std::polar(1.0, -bounds.centre() * dt);
  for (std::size_t i = 0; i < n; ++i) state[i] = phase * ws.acc[i];
  return {a.size(), alpha};
}

/// state <- exp(-(H - E_ref) tau) state, no normalisation. E_ref should sit
/// close to the lowest populated level: truncation error is absolute, so the
/// wanted components must not be exponentially small.
template <HermitianOperator Op>
ChebyshevStats chebyshev_imaginary_step(const Op& op, const SpectralBounds& bounds,
                                        double tau, double tol, std::span<cplx> state,
                                        ChebyshevWorkspace& ws, double reference,
                                        std::size_t max_terms = 20000) {
  require(tau > 0.0, ErrorKind::invalid_parameter, "chebyshev: tau must be positive");
  require(state.size() == op.size(), ErrorKind::shape, "chebyshev: state size mismatch");
  require(reference >= bounds.lower, ErrorKind::invalid_parameter,
          "chebyshev: reference energy below the spectral bound");
  const double alpha = bounds.half_width() * tau;
  const double scale = std::exp((reference - bounds.lower) * tau);
  const auto c = imaginary_time_coefficients(alpha, tol, max_terms, scale);
  const std::size_t n = state.size();
  ws.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    ws.prev[i] = state[i];
    ws.acc[i] = c[0] * state[i];
  }
  if (c.size() > 1) {
    detail::apply_normalised(op, bounds, ws.prev, ws.curr);
    for (std::size_t i = 0; i < n; ++i) ws.acc[i] += c[1] * ws.curr[i];
  }
  for (std::size_t k = 2; k < c.size(); ++k) {
    detail::apply_normalised(op, bounds, ws.curr, ws.next);
    for (std::size_t i = 0; i < n; ++i) {
      ws.next[i] = 2.0 * ws.next[i] - ws.prev[i];
      ws.acc[i] += c[k] * ws.next[i];
    }
    std::swap(ws.prev, ws.curr);
    std::swap(ws.curr, ws.next);
  }
  for (std::size_t i = 0; i < n; ++i) state[i] = ws.acc[i];
  return {c.size(), alpha};
}

}  // namespace qpr
