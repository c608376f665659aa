#pragma once

// Coupled-channel representation of the wire electron: one complex
// amplitude psi_i(x2) per retained dot eigenstate, and the real-symmetric
// matrix potential that couples them.

#include <cstddef>
#include <span>
#include <vector>

#include "qpr/chebyshev.hpp"
#include "qpr/fft.hpp"
#include "qpr/grid.hpp"

namespace qpr {

/// Channel-major storage: component i occupies data[i*n, (i+1)*n).
struct ChannelField {
  Grid1D grid;
  std::size_t n_ch = 0;
  std::vector<cplx> data;

  ChannelField() = default;
  ChannelField(const Grid1D& g, std::size_t channels)
      : grid(g), n_ch(channels), data(g.n * channels) {}

  std::span<cplx> component(std::size_t i) { return {data.data() + i * grid.n, grid.n}; }
  std::span<const cplx> component(std::size_t i) const {
    return {data.data() + i * grid.n, grid.n};
  }

  /// sum_i int |psi_i|^2 dx
  double norm_squared() const;
  double component_norm_squared(std::size_t i) const;
  /// Probability inside [a, b], all channels.
  double probability_between(double a, double b) const;
};

/// <a|b> = sum_i int conj(a_i) b_i dx. Throws ErrorKind::shape on mismatch.
cplx inner_product(const ChannelField& a, const ChannelField& b);

enum class Basis { dot_energy, qubit };

/// V(x2) as an n_ch x n_ch real symmetric matrix per grid point. Diagonal
/// entries hold V_ii + V_wire + E_i.
struct ChannelPotential {
  Grid1D grid;
  std::size_t n_ch = 0;
  std::vector<double> values;  ///< values[(ix * n_ch + i) * n_ch + j]
  Basis basis = Basis::dot_energy;

  ChannelPotential() = default;
  ChannelPotential(const Grid1D& g, std::size_t channels, Basis b = Basis::dot_energy)
      : grid(g), n_ch(channels), values(g.n * channels * channels, 0.0), basis(b) {}

  double& at(std::size_t ix, std::size_t i, std::size_t j) {
    return values[(ix * n_ch + i) * n_ch + j];
  }
  double at(std::size_t ix, std::size_t i, std::size_t j) const {
    return values[(ix * n_ch + i) * n_ch + j];
  }
  /// Sets (i, j) and (j, i) together.
  void set_symmetric(std::size_t ix, std::size_t i, std::size_t j, double v) {
    at(ix, i, j) = v;
    at(ix, j, i) = v;
  }
  std::vector<double> diagonal(std::size_t i) const;
  std::vector<double> element(std::size_t i, std::size_t j) const;
};

/// H = -K d^2/dx^2 + V(x). The kinetic term is applied spectrally.
/// Holds its own FFT workspace, so one instance serves one propagation run.
class ChannelHamiltonian {
 public:
  ChannelHamiltonian(ChannelPotential potential, double kinetic_coeff);

  std::size_t size() const { return potential_.grid.n * potential_.n_ch; }
  const ChannelPotential& potential() const { return potential_; }
  double kinetic_coeff() const { return kinetic_; }

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  ChannelField apply(const ChannelField& state) const;

 private:
  ChannelPotential potential_;
  double kinetic_;
  FftPlan plan_;
  std::vector<double> k2_;
  mutable std::vector<cplx> scratch_;
};

/// E_u >= K k_max^2 + max V_diag + max row-sum |V_offdiag|,
/// E_l <= min V_diag - max row-sum; both sides padded by 5 % of the span.
SpectralBounds estimate_spectral_bounds(const ChannelHamiltonian& h);

}  // namespace qpr
