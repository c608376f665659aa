#include "qpr/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qpr/chebyshev.hpp"
#include "qpr/error.hpp"
#include "qpr/fft.hpp"

namespace qpr {

void WavepacketSpec::validate() const {
  require(std::isfinite(mean_energy) && mean_energy > 0.0, ErrorKind::invalid_parameter,
          "wavepacket: mean energy must be positive");
  require(energy_spread > 0.0 && energy_spread < 0.2, ErrorKind::invalid_parameter,
          "wavepacket: energy spread must lie in (0, 0.2)");
}

PacketShape packet_shape(const WavepacketSpec& spec, const PhysicalModel& model,
                         double window_half_width) {
  spec.validate();
  const double K = model.kinetic_coeff;
  const double k_first = std::sqrt(spec.mean_energy / K);
  PacketShape s;
  s.sigma_k = spec.energy_spread * spec.mean_energy / (2.0 * K * k_first);
  s.k0 = std::sqrt(spec.mean_energy / K - s.sigma_k * s.sigma_k);
  s.sigma_x = 0.5 / s.sigma_k;
  s.x0 = std::isnan(spec.launch_center) ? -(window_half_width + 7.0 * s.sigma_x)
                                          : spec.launch_center;
  return s;
}

std::vector<cplx> make_wavepacket(const WavepacketSpec& spec, const Grid1D& grid,
                                  const PhysicalModel& model, double window_half_width) {
  const PacketShape s = packet_shape(spec, model, window_half_width);
  require(s.k0 < 0.5 * grid.k_max(), ErrorKind::invalid_parameter,
          "wavepacket: central wavenumber not resolved, reduce dx");
  if (s.x0 - 7.0 * s.sigma_x < grid.x_min || s.x0 + 7.0 * s.sigma_x > -window_half_width * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "wavepacket: packet of width " << s.sigma_x << " nm centred at " << s.x0
        << " nm does not fit between the grid edge " << grid.x_min
        << " nm and the interaction window";
    fail(ErrorKind::geometry, msg.str());
  }
  std::vector<cplx> psi(grid.n);
  const double amp = std::pow(2.0 * std::numbers::pi * s.sigma_x * s.sigma_x, -0.25);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double u = grid.x(i) - s.x0;
    psi[i] = amp * std::exp(-u * u / (4.0 * s.sigma_x * s.sigma_x)) *
             std::polar(1.0, s.k0 * grid.x(i));
  }
  double norm = 0.0;
  for (const auto& v : psi) norm += std::norm(v);
  const double scale = 1.0 / std::sqrt(norm * grid.dx);
  for (auto& v : psi) v *= scale;
  return psi;
}

double kinetic_expectation(std::span<const cplx> psi, const Grid1D& grid, double kinetic_coeff) {
  require(psi.size() == grid.n, ErrorKind::shape, "kinetic_expectation: size mismatch");
  std::vector<cplx> f(psi.begin(), psi.end());
  FftPlan plan(grid.n, 1);
  plan.forward(f);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double k = grid.k(j);
    num += kinetic_coeff * k * k * std::norm(f[j]);
    den += std::norm(f[j]);
  }
  return num / den;
}

double interaction_half_width(const ChannelPotential& potential, const DeviceGeometry& geom,
                              double coupling_cut) {
  const std::size_t nc = potential.n_ch;
  const std::size_t n = potential.grid.n;
  double half = geom.r + 5.0 * geom.s;
  // Each element measured against its value at the grid edge, where only
  // the dot energies and the common monopole tail remain.
  auto extent = [&](auto&& value) {
    const double far = value(0);
    double peak = 0.0;
    for (std::size_t ix = 0; ix < n; ++ix) peak = std::max(peak, std::abs(value(ix) - far));
    if (peak == 0.0) return;
    for (std::size_t ix = 0; ix < n; ++ix) {
      if (std::abs(value(ix) - far) > coupling_cut * peak) {
        half = std::max(half, std::abs(potential.grid.x(ix)));
      }
    }
  };
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = i + 1; j < nc; ++j) {
      extent([&](std::size_t ix) { return potential.at(ix, i, j); });
    }
    if (i > 0) {
      extent([&](std::size_t ix) { return potential.at(ix, i, i) - potential.at(ix, 0, 0); });
    }
  }
  return half;
}

namespace {

double edge_probability(const ChannelField& f, double width_fraction) {
  const std::size_t zone =
      std::max<std::size_t>(1, static_cast<std::size_t>(width_fraction * f.grid.n));
  double s = 0.0;
  for (std::size_t c = 0; c < f.n_ch; ++c) {
    const auto comp = f.component(c);
    for (std::size_t i = 0; i < zone; ++i) s += std::norm(comp[i]) + std::norm(comp[f.grid.n - 1 - i]);
  }
  return s * f.grid.dx;
}

}  // namespace

ScatteringRun run_scattering(const Eigen::VectorXd& initial, std::span<const cplx> packet,
                             const ChannelPotential& potential, const PhysicalModel& model,
                             const PacketShape& shape, double window_half_width,
                             const ScatteringOptions& opts) {
  const Grid1D& grid = potential.grid;
  require(static_cast<std::size_t>(initial.size()) == potential.n_ch, ErrorKind::shape,
          "scattering: initial channel vector has the wrong length");
  require(packet.size() == grid.n, ErrorKind::shape, "scattering: packet size mismatch");
  require(opts.dt > 0.0 && opts.max_time > 0.0, ErrorKind::invalid_parameter,
          "scattering: dt and max_time must be positive");

  ChannelHamiltonian h(potential, model.kinetic_coeff);
  const SpectralBounds bounds = estimate_spectral_bounds(h);
  ChannelField psi(grid, potential.n_ch);
  for (std::size_t c = 0; c < potential.n_ch; ++c) {
    auto comp = psi.component(c);
    for (std::size_t i = 0; i < grid.n; ++i) comp[i] = initial(static_cast<Eigen::Index>(c)) * packet[i];
  }
  const double norm0 = psi.norm_squared();
  const double velocity = 2.0 * model.kinetic_coeff * shape.k0;
  const double arrival = std::max(0.0, (-shape.x0 - window_half_width) / velocity);
  const auto settle_steps = static_cast<std::size_t>(
      std::ceil(2.0 * window_half_width / velocity / opts.dt));

  ScatteringRun run;
  ChebyshevWorkspace ws;
  std::vector<double> history;
  for (;;) {
    const double in_window = psi.probability_between(-window_half_width, window_half_width);
    run.window_probability = in_window / norm0;
    history.push_back(run.window_probability);
    if (run.elapsed >= arrival) {
      if (run.window_probability < opts.stop_fraction) break;
      if (run.window_probability < opts.trapped_fraction && history.size() > settle_steps) {
        const double before = history[history.size() - 1 - settle_steps];
        if (before - run.window_probability < opts.settle_change * run.window_probability) {
          run.trapped = true;
          break;
        }
      }
    }
    if (run.elapsed >= opts.max_time) {
      std::ostringstream msg;
      msg << "scattering: packet not separated after t = " << run.elapsed
          << " (window probability " << run.window_probability << ")";
      fail(ErrorKind::timeout, msg.str());
    }
    const auto stats = chebyshev_step(h, bounds, opts.dt, opts.tol, std::span<cplx>(psi.data), ws,
                                      opts.max_terms);
    run.operator_applications += stats.terms - 1;
    run.elapsed += opts.dt;
    ++run.steps;
    const double edge = edge_probability(psi, opts.edge_width) / norm0;
    run.max_edge_probability = std::max(run.max_edge_probability, edge);
    if (edge > opts.edge_fraction) {
      const double remainder = psi.probability_between(-window_half_width, window_half_width) / norm0;
      if (run.elapsed >= arrival && remainder < opts.trapped_fraction) {
        run.window_probability = remainder;
        run.trapped = true;
        break;
      }
      std::ostringstream msg;
      msg << "scattering: probability " << edge << " reached the grid edge at t = " << run.elapsed
          << "; enlarge the grid";
      fail(ErrorKind::geometry, msg.str());
    }
  }
  run.norm_drift = std::abs(psi.norm_squared() - norm0);
  run.field = std::move(psi);
  return run;
}

std::size_t KrausSet::nearest(double q) const {
  require(!p.empty(), ErrorKind::shape, "kraus: empty lattice");
  const auto it = std::lower_bound(p.begin(), p.end(), q);
  if (it == p.begin()) return 0;
  if (it == p.end()) return p.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - p.begin());
  return (q - p[hi - 1] <= p[hi] - q) ? hi - 1 : hi;
}

namespace {

/// <k|f> = dx / sqrt(2 pi) sum_n f_n exp(-i k x_n), FFT order.
std::vector<cplx> momentum_amplitudes(std::span<const cplx> f, const Grid1D& grid,
                                      const FftPlan& plan) {
  std::vector<cplx> out(f.begin(), f.end());
  plan.forward(out);
  const double pre = grid.dx / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < grid.n; ++j) out[j] *= pre * std::polar(1.0, -grid.k(j) * grid.x_min);
  return out;
}

}  // namespace

KrausSet extract_kraus(const ChannelField& run0, const ChannelField& run1,
                       std::span<const cplx> packet, const Eigen::Matrix2d& qubit_transform,
                       const ExtractionOptions& opts) {
  require(run0.grid == run1.grid && run0.n_ch == run1.n_ch, ErrorKind::shape,
          "extract_kraus: runs live on different grids");
  require(run0.n_ch >= 2, ErrorKind::shape, "extract_kraus: need the two qubit channels");
  const Grid1D& grid = run0.grid;
  const std::size_t nc = run0.n_ch;
  require(packet.size() == grid.n, ErrorKind::shape, "extract_kraus: packet size mismatch");

  FftPlan plan(grid.n, 1);
  // amp[j][i] = momentum amplitudes of channel i in run j
  std::vector<std::vector<std::vector<cplx>>> amp(2, std::vector<std::vector<cplx>>(nc));
  const ChannelField* runs[2] = {&run0, &run1};
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < nc; ++i) amp[j][i] = momentum_amplitudes(runs[j]->component(i), grid, plan);
    for (std::size_t k = 0; k < grid.n; ++k) {
      const cplx a = amp[j][0][k];
      const cplx b = amp[j][1][k];
      amp[j][0][k] = qubit_transform(0, 0) * a + qubit_transform(1, 0) * b;
      amp[j][1][k] = qubit_transform(0, 1) * a + qubit_transform(1, 1) * b;
    }
  }
  const auto inc = momentum_amplitudes(packet, grid, plan);

  std::vector<std::size_t> order(grid.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return grid.k(a) < grid.k(b); });

  std::vector<double> summed(grid.n, 0.0);
  double peak = 0.0;
  for (std::size_t k = 0; k < grid.n; ++k) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < nc; ++i) summed[k] += std::abs(amp[j][i][k]);
    }
    peak = std::max(peak, summed[k]);
  }

  KrausSet ks;
  ks.n_ch = nc;
  const double dp = grid.dk();
  Eigen::Matrix2cd gram = Eigen::Matrix2cd::Zero();
  std::vector<double> leak(2, 0.0);
  double inc_peak = -1.0;
  for (std::size_t k : order) {
    Eigen::MatrixXcd a(nc, 2);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < nc; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = amp[j][i][k];
    }
    if (summed[k] < opts.discard_fraction * peak) {
      ks.discarded += dp * a.squaredNorm();
      continue;
    }
    gram += dp * (a.adjoint() * a);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t i = 2; i < nc; ++i) leak[j] += dp * std::norm(amp[j][i][k]);
    }
    const double w = std::norm(inc[k]);
    if (w > inc_peak) {
      inc_peak = w;
      ks.p0 = grid.k(k);
    }
    ks.p.push_back(grid.k(k));
    ks.weight.push_back(dp);
    ks.A.push_back(std::move(a));
    ks.incident.push_back(w);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gram - Eigen::Matrix2cd::Identity());
  ks.completeness_defect = es.eigenvalues().cwiseAbs().maxCoeff();
  ks.leakage = std::max(leak[0], leak[1]);
  if (!(ks.completeness_defect <= opts.max_defect)) {
    std::ostringstream msg;
    msg << "extract_kraus: completeness defect " << ks.completeness_defect << " exceeds "
        << opts.max_defect;
    fail(ErrorKind::extraction, msg.str());
  }
  return ks;
}

double transmission_coefficient(std::size_t j, const KrausSet& kraus) {
  require(j < 2, ErrorKind::invalid_parameter, "transmission: qubit index must be 0 or 1");
  double t = 0.0;
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    if (kraus.p[k] > 0.0) t += kraus.weight[k] * kraus.A[k].col(static_cast<Eigen::Index>(j)).squaredNorm();
  }
  return t;
}

double inelastic_fraction(std::size_t j, const KrausSet& kraus, const PacketShape& shape,
                          double band_sigmas) {
  require(j < 2, ErrorKind::invalid_parameter, "inelastic_fraction: qubit index must be 0 or 1");
  const auto jj = static_cast<Eigen::Index>(j);
  double outside = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const bool in_band = std::abs(std::abs(kraus.p[k]) - shape.k0) <= band_sigmas * shape.sigma_k;
    for (std::size_t i = 0; i < kraus.n_ch; ++i) {
      const double w = kraus.weight[k] * std::norm(kraus.A[k](static_cast<Eigen::Index>(i), jj));
      total += w;
      if (i >= 2 || !in_band) outside += w;
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

double factorization_spread(const KrausSet& kraus, std::size_t i, std::size_t j,
                            double p_centre, double half_band) {
  require(i < kraus.n_ch && j < 2, ErrorKind::invalid_parameter,
          "factorization_spread: index out of range");
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  auto ratio = [&](std::size_t k) {
    const std::size_t m = kraus.p[k] < 0.0 ? kraus.nearest(-kraus.p[k]) : k;
    return std::abs(kraus.A[k](ii, jj)) / std::sqrt(kraus.incident[m]);
  };
  const double ref = ratio(kraus.nearest(p_centre));
  double worst = 0.0;
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    if (std::abs(kraus.p[k] - p_centre) > half_band) continue;
    const double v = ratio(k);
    worst = std::max(worst, std::abs(v - ref) / ref);
  }
  return worst;
}

}  // namespace qpr
