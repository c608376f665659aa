#include "qpr/channel.hpp"

#include <algorithm>
#include <cmath>

#include "qpr/error.hpp"

namespace qpr {

double ChannelField::norm_squared() const {
  double s = 0.0;
  for (const auto& v : data) s += std::norm(v);
  return s * grid.dx;
}

double ChannelField::component_norm_squared(std::size_t i) const {
  double s = 0.0;
  for (const auto& v : component(i)) s += std::norm(v);
  return s * grid.dx;
}

double ChannelField::probability_between(double a, double b) const {
  double s = 0.0;
  for (std::size_t c = 0; c < n_ch; ++c) {
    const auto comp = component(c);
    for (std::size_t ix = 0; ix < grid.n; ++ix) {
      const double x = grid.x(ix);
      if (x >= a && x <= b) s += std::norm(comp[ix]);
    }
  }
  return s * grid.dx;
}

cplx inner_product(const ChannelField& a, const ChannelField& b) {
  require(a.grid == b.grid && a.n_ch == b.n_ch, ErrorKind::shape,
          "inner_product: fields live on different grids");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += std::conj(a.data[i]) * b.data[i];
  return s * a.grid.dx;
}

std::vector<double> ChannelPotential::diagonal(std::size_t i) const { return element(i, i); }

std::vector<double> ChannelPotential::element(std::size_t i, std::size_t j) const {
  std::vector<double> out(grid.n);
  for (std::size_t ix = 0; ix < grid.n; ++ix) out[ix] = at(ix, i, j);
  return out;
}

ChannelHamiltonian::ChannelHamiltonian(ChannelPotential potential, double kinetic_coeff)
    : potential_(std::move(potential)),
      kinetic_(kinetic_coeff),
      plan_(potential_.grid.n, potential_.n_ch),
      k2_(potential_.grid.n),
      scratch_(potential_.grid.n * potential_.n_ch) {
  require(potential_.n_ch > 0, ErrorKind::shape, "hamiltonian: no channels");
  require(potential_.values.size() == potential_.grid.n * potential_.n_ch * potential_.n_ch,
          ErrorKind::shape, "hamiltonian: potential storage has the wrong size");
  const double inv_n = 1.0 / static_cast<double>(potential_.grid.n);
  for (std::size_t j = 0; j < potential_.grid.n; ++j) {
    const double k = potential_.grid.k(j);
    k2_[j] = kinetic_ * k * k * inv_n;
  }
}

void ChannelHamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
  require(in.size() == size() && out.size() == size(), ErrorKind::shape,
          "hamiltonian: state has the wrong size");
  const std::size_t n = potential_.grid.n;
  const std::size_t nc = potential_.n_ch;

  std::copy(in.begin(), in.end(), scratch_.begin());
  plan_.forward(scratch_);
  for (std::size_t c = 0; c < nc; ++c) {
    cplx* blk = scratch_.data() + c * n;
    for (std::size_t j = 0; j < n; ++j) blk[j] *= k2_[j];
  }
  plan_.backward(scratch_);

  const double* v = potential_.values.data();
  for (std::size_t ix = 0; ix < n; ++ix) {
    const double* row = v + ix * nc * nc;
    for (std::size_t i = 0; i < nc; ++i) {
      cplx acc = scratch_[i * n + ix];
      for (std::size_t j = 0; j < nc; ++j) acc += row[i * nc + j] * in[j * n + ix];
      out[i * n + ix] = acc;
    }
  }
}

ChannelField ChannelHamiltonian::apply(const ChannelField& state) const {
  require(state.grid == potential_.grid && state.n_ch == potential_.n_ch, ErrorKind::shape,
          "hamiltonian: state and potential live on different grids");
  ChannelField out(state.grid, state.n_ch);
  apply(std::span<const cplx>(state.data), std::span<cplx>(out.data));
  return out;
}

SpectralBounds estimate_spectral_bounds(const ChannelHamiltonian& h) {
  const auto& pot = h.potential();
  const std::size_t nc = pot.n_ch;
  double vmax = -INFINITY;
  double vmin = INFINITY;
  double rowsum_max = 0.0;
  for (std::size_t ix = 0; ix < pot.grid.n; ++ix) {
    for (std::size_t i = 0; i < nc; ++i) {
      vmax = std::max(vmax, pot.at(ix, i, i));
      vmin = std::min(vmin, pot.at(ix, i, i));
      double rs = 0.0;
      for (std::size_t j = 0; j < nc; ++j) {
        if (j != i) rs += std::abs(pot.at(ix, i, j));
      }
      rowsum_max = std::max(rowsum_max, rs);
    }
  }
  const double kmax = pot.grid.k_max();
  double upper = h.kinetic_coeff() * kmax * kmax + vmax + rowsum_max;
  double lower = vmin - rowsum_max;
  const double pad = 0.05 * (upper - lower);
  return {lower - pad, upper + pad};
}

}  // namespace qpr
