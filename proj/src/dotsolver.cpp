#include "qpr/dotsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qpr/error.hpp"

namespace qpr {

DotHamiltonian::DotHamiltonian(const Grid2D& grid, const DeviceGeometry& geom,
                               const PhysicalModel& model)
    : grid_(grid),
      kinetic_(model.kinetic_coeff),
      potential_(grid.size()),
      k2_(grid.size()),
      plan_(grid.x.n, grid.y.n, 1),
      scratch_(grid.size()) {
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
    const double kx = grid.x.k(ix);
    for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
      const double ky = grid.y.k(iy);
      const std::size_t idx = grid.index(ix, iy);
      potential_[idx] = dot_potential(grid.x.x(ix), grid.y.x(iy), geom, model);
      k2_[idx] = kinetic_ * (kx * kx + ky * ky) * inv_n;
    }
  }
}

void DotHamiltonian::apply_kinetic(std::span<const cplx> in, std::span<cplx> out) const {
  require(in.size() == size() && out.size() == size(), ErrorKind::shape,
          "dot hamiltonian: state has the wrong size");
  std::copy(in.begin(), in.end(), out.begin());
  plan_.forward(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= k2_[i];
  plan_.backward(out);
}

void DotHamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
  apply_kinetic(in, scratch_);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = scratch_[i] + potential_[i] * in[i];
}

SpectralBounds DotHamiltonian::bounds() const {
  const auto [vmin, vmax] = std::minmax_element(potential_.begin(), potential_.end());
  const double kx = grid_.x.k_max();
  const double ky = grid_.y.k_max();
  const double upper = kinetic_ * (kx * kx + ky * ky) + *vmax;
  // min V is a strict lower bound (the kinetic term is positive), and a tight
  // lower edge keeps the imaginary-time coefficients O(1).
  const double lower = *vmin;
  const double pad = 0.05 * (upper - lower);
  return {lower - 1e-9 * pad, upper + pad};
}

namespace {

using Block = std::vector<std::vector<cplx>>;

/// Index of y -> -y on the periodic lattice.
std::size_t mirror_y(const Grid2D& g, std::size_t iy) { return (g.y.n - iy) % g.y.n; }

void project_parity(const Grid2D& g, std::span<cplx> f, int sign) {
  for (std::size_t ix = 0; ix < g.x.n; ++ix) {
    for (std::size_t iy = 0; iy <= g.y.n / 2; ++iy) {
      const std::size_t a = g.index(ix, iy);
      const std::size_t b = g.index(ix, mirror_y(g, iy));
      const cplx sym = 0.5 * (f[a] + static_cast<double>(sign) * f[b]);
      f[a] = sym;
      f[b] = static_cast<double>(sign) * sym;
    }
  }
}

double dot(std::span<const cplx> a, std::span<const cplx> b, double area) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real();
  return s * area;
}

void orthonormalise(Block& x, double area) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double c = dot(x[j], x[i], area);
        for (std::size_t p = 0; p < x[i].size(); ++p) x[i][p] -= c * x[j][p];
      }
      const double nrm = std::sqrt(dot(x[i], x[i], area));
      require(nrm > 1e-300, ErrorKind::convergence, "dot solver: subspace collapsed");
      for (auto& v : x[i]) v /= nrm;
    }
  }
}

struct SectorResult {
  std::vector<double> energies;
  Block vectors;
  std::vector<double> residuals;
};

std::vector<std::pair<int, int>> seed_monomials(std::size_t count) {
  std::vector<std::pair<int, int>> out;
  for (int order = 0; out.size() < count; ++order) {
    for (int a = order; a >= 0 && out.size() < count; --a) out.emplace_back(a, order - a);
  }
  return out;
}

SectorResult solve_sector(const DotHamiltonian& h, const DeviceGeometry& geom,
                          const PhysicalModel& model, int sign, std::size_t block,
                          std::size_t wanted, const DotSolverOptions& opts) {
  const Grid2D& g = h.grid();
  const double area = g.cell_area();
  const double l = dot_oscillator_length(geom, model);

  Block x(block, std::vector<cplx>(g.size()));
  const auto monomials = seed_monomials(block);
  for (std::size_t b = 0; b < block; ++b) {
    const auto [pa, pb] = monomials[b];
    for (std::size_t ix = 0; ix < g.x.n; ++ix) {
      const double u = g.x.x(ix) / l;
      for (std::size_t iy = 0; iy < g.y.n; ++iy) {
        const double w = (g.y.x(iy) - geom.y_c) / l;
        x[b][g.index(ix, iy)] = std::pow(u, pa) * std::pow(w, pb) * std::exp(-0.5 * (u * u + w * w));
      }
    }
    project_parity(g, x[b], sign);
  }
  orthonormalise(x, area);

  const SpectralBounds bounds = h.bounds();
  const auto pot = h.potential();
  const double reference = *std::min_element(pot.begin(), pot.end());
  ChebyshevWorkspace ws;
  Block hx(block, std::vector<cplx>(g.size()));
  SectorResult res;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    for (auto& v : x) {
      chebyshev_imaginary_step(h, bounds, opts.tau, opts.chebyshev_tol, v, ws, reference);
      for (auto& z : v) z = z.real();
      project_parity(g, v, sign);
    }
    orthonormalise(x, area);

    for (std::size_t b = 0; b < block; ++b) h.apply(x[b], hx[b]);
    Eigen::MatrixXd s(block, block);
    for (std::size_t i = 0; i < block; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = 0.5 * (dot(x[i], hx[j], area) + dot(hx[i], x[j], area));
        s(i, j) = v;
        s(j, i) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    const Eigen::MatrixXd& u = eig.eigenvectors();
    Block nx(block, std::vector<cplx>(g.size(), 0.0));
    Block nhx(block, std::vector<cplx>(g.size(), 0.0));
    for (std::size_t a = 0; a < block; ++a) {
      for (std::size_t b = 0; b < block; ++b) {
        const double c = u(b, a);
        for (std::size_t p = 0; p < g.size(); ++p) {
          nx[a][p] += c * x[b][p];
          nhx[a][p] += c * hx[b][p];
        }
      }
    }
    x.swap(nx);
    hx.swap(nhx);

    res.energies.assign(block, 0.0);
    res.residuals.assign(block, 0.0);
    bool converged = true;
    for (std::size_t a = 0; a < block; ++a) {
      const double e = eig.eigenvalues()(static_cast<Eigen::Index>(a));
      double r2 = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) r2 += std::norm(hx[a][p] - e * x[a][p]);
      res.energies[a] = e;
      res.residuals[a] = std::sqrt(r2 * area);
      if (a < wanted && res.residuals[a] >= opts.residual_tol * std::abs(e)) converged = false;
    }
    if (converged) {
      res.vectors = std::move(x);
      return res;
    }
  }
  std::ostringstream msg;
  msg << "dot solver: no convergence after " << opts.max_iterations
      << " iterations (parity " << sign << ", residuals";
  for (std::size_t a = 0; a < wanted; ++a) msg << ' ' << res.residuals[a];
  msg << ")";
  fail(ErrorKind::convergence, msg.str());
}

/// Index of the grid point closest to (x, y).
std::size_t nearest_index(const Grid2D& g, double x, double y) {
  auto nearest = [](const Grid1D& a, double v) {
    const double t = std::round((v - a.x_min) / a.dx);
    const auto i = static_cast<long long>(t);
    const auto n = static_cast<long long>(a.n);
    return static_cast<std::size_t>(((i % n) + n) % n);
  };
  return g.index(nearest(g.x, x), nearest(g.y, y));
}

}  // namespace

ChannelSet solve_dot_eigenstates(const DeviceGeometry& geom, const PhysicalModel& model,
                                 const Grid2D& grid, const DotSolverOptions& opts) {
  geom.validate();
  require(opts.n_states >= 1 && opts.n_states <= 8, ErrorKind::invalid_parameter,
          "dot solver: n_states must be in [1, 8]");
  const double l = dot_oscillator_length(geom, model);
  const double reach = geom.y_c + 5.0 * l;
  require(grid.y.x_min <= -reach && grid.y.x_max >= reach, ErrorKind::invalid_parameter,
          "dot solver: grid must span +-(y_c + 5 l_osc) in y");
  require(grid.x.x_min <= -5.0 * l && grid.x.x_max >= 5.0 * l, ErrorKind::invalid_parameter,
          "dot solver: grid must span +-5 l_osc in x");
  require(std::abs(grid.y.x_min + grid.y.x_max) < 1e-9 * grid.y.dx &&
              std::abs(grid.x.x_min + grid.x.x_max) < 1e-9 * grid.x.dx,
          ErrorKind::invalid_parameter, "dot solver: grid must be centred on the origin");

  const DotHamiltonian h(grid, geom, model);
  const std::size_t block = std::max(opts.block_per_parity, opts.n_states + 2);
  SectorResult even = solve_sector(h, geom, model, +1, block, opts.n_states, opts);
  SectorResult odd = solve_sector(h, geom, model, -1, block, opts.n_states, opts);

  struct Entry {
    double e;
    double res;
    const std::vector<cplx>* v;
  };
  std::vector<Entry> all;
  for (std::size_t a = 0; a < opts.n_states; ++a) {
    all.push_back({even.energies[a], even.residuals[a], &even.vectors[a]});
    all.push_back({odd.energies[a], odd.residuals[a], &odd.vectors[a]});
  }
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.e < b.e; });

  ChannelSet set;
  set.grid = grid;
  const std::size_t anchor = nearest_index(grid, 0.0, -geom.y_c);
  for (std::size_t a = 0; a < opts.n_states; ++a) {
    std::vector<double> phi(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) phi[p] = (*all[a].v)[p].real();
    double ref = phi[anchor];
    if (a >= 2 || std::abs(ref) < 1e-12) {
      // Largest-magnitude point of the wire-side half plane decides the sign.
      std::size_t best = 0;
      double best_abs = -1.0;
      for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
        for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
          if (grid.y.x(iy) >= 0.0) continue;
          const std::size_t idx = grid.index(ix, iy);
          if (std::abs(phi[idx]) > best_abs * (1.0 + 1e-9)) {
            best_abs = std::abs(phi[idx]);
            best = idx;
          }
        }
      }
      ref = phi[best];
    }
    if (ref < 0.0) {
      for (auto& v : phi) v = -v;
    }
    set.energies.push_back(all[a].e);
    set.residuals.push_back(all[a].res);
    set.eigenfunctions.push_back(std::move(phi));
  }
  return set;
}

double lower_half_probability(const Grid2D& grid, std::span<const double> phi) {
  double s = 0.0;
  for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
    for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
      if (grid.y.x(iy) < 0.0) s += phi[grid.index(ix, iy)] * phi[grid.index(ix, iy)];
    }
  }
  return s * grid.cell_area();
}

double parity_defect(const Grid2D& grid, std::span<const double> phi, int sign) {
  double s = 0.0;
  for (std::size_t ix = 0; ix < grid.x.n; ++ix) {
    for (std::size_t iy = 0; iy < grid.y.n; ++iy) {
      const double d = phi[grid.index(ix, iy)] -
                       static_cast<double>(sign) * phi[grid.index(ix, mirror_y(grid, iy))];
      s += d * d;
    }
  }
  return std::sqrt(s * grid.cell_area());
}

std::pair<double, double> kinetic_potential_expectation(const DotHamiltonian& h,
                                                        std::span<const double> phi) {
  std::vector<cplx> in(phi.begin(), phi.end());
  std::vector<cplx> out(in.size());
  h.apply_kinetic(in, out);
  double t = 0.0;
  double v = 0.0;
  const auto pot = h.potential();
  for (std::size_t i = 0; i < in.size(); ++i) {
    t += phi[i] * out[i].real();
    v += phi[i] * phi[i] * pot[i];
  }
  const double area = h.grid().cell_area();
  return {t * area, v * area};
}

ChannelSet build_qubit_basis(ChannelSet set) {
  require(set.size() >= 2, ErrorKind::basis_construction,
          "qubit basis: need at least two dot states");
  const auto& g = set.grid;
  const double even_defect = parity_defect(g, set.eigenfunctions[0], +1);
  const double odd_defect = parity_defect(g, set.eigenfunctions[1], -1);
  require(even_defect < 1e-6 && odd_defect < 1e-6, ErrorKind::basis_construction,
          "qubit basis: lowest pair lacks definite (even, odd) parity");

  const double h = 1.0 / std::numbers::sqrt2;
  Eigen::Matrix2d q;
  q << h, h, -h, h;
  std::vector<double> one(g.size());
  for (std::size_t p = 0; p < g.size(); ++p)
    one[p] = h * (set.eigenfunctions[0][p] + set.eigenfunctions[1][p]);
  const double loc = lower_half_probability(g, one);
  require(loc >= 0.95, ErrorKind::basis_construction,
          "qubit basis: |1> is only " + std::to_string(loc) +
              " localised on the wire side; grid or geometry unsuitable");

  set.qubit_transform = q;
  set.has_qubit_basis = true;
  set.one_localization = loc;
  set.tunnel_splitting = set.energies[1] - set.energies[0];
  set.rabi_period = set.tunnel_splitting > 0.0
                        ? 2.0 * std::numbers::pi / set.tunnel_splitting
                        : INFINITY;
  return set;
}

}  // namespace qpr
