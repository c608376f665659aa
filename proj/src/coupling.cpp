#include "qpr/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpr/error.hpp"
#include "qpr/parallel.hpp"

namespace qpr {

namespace {

/// Dot quadrature nodes with pair densities phi_i phi_j dA, i <= j.
struct Nodes {
  std::size_t pairs = 0;
  std::vector<double> x, y;
  std::vector<double> w;  ///< w[node * pairs + pair]
};

std::size_t pair_count(std::size_t n) { return n * (n + 1) / 2; }

Nodes collect_nodes(const ChannelSet& ch, double prune, std::size_t stride) {
  const Grid2D& g = ch.grid;
  const std::size_t nc = ch.size();
  Nodes nodes;
  nodes.pairs = pair_count(nc);
  double peak = 0.0;
  std::vector<double> dens(g.size(), 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (std::size_t i = 0; i < nc; ++i) dens[p] += ch.eigenfunctions[i][p] * ch.eigenfunctions[i][p];
    peak = std::max(peak, dens[p]);
  }
  const double area = g.cell_area() * static_cast<double>(stride * stride);
  for (std::size_t ix = 0; ix < g.x.n; ix += stride) {
    for (std::size_t iy = 0; iy < g.y.n; iy += stride) {
      const std::size_t p = g.index(ix, iy);
      if (dens[p] < prune * peak) continue;
      nodes.x.push_back(g.x.x(ix));
      nodes.y.push_back(g.y.x(iy));
      for (std::size_t i = 0; i < nc; ++i) {
        for (std::size_t j = i; j < nc; ++j) {
          nodes.w.push_back(ch.eigenfunctions[i][p] * ch.eigenfunctions[j][p] * area);
        }
      }
    }
  }
  return nodes;
}

void integrate(const Nodes& nodes, double x2, double offset, double soft2, double coulomb,
               double* out) {
  const std::size_t np = nodes.pairs;
  std::fill(out, out + np, 0.0);
  for (std::size_t n = 0; n < nodes.x.size(); ++n) {
    const double dx = nodes.x[n] - x2;
    const double dy = nodes.y[n] + offset;
    const double kern = 1.0 / std::sqrt(dx * dx + dy * dy + soft2);
    const double* w = nodes.w.data() + n * np;
    for (std::size_t k = 0; k < np; ++k) out[k] += w[k] * kern;
  }
  for (std::size_t k = 0; k < np; ++k) out[k] *= coulomb;
}

void check_inputs(const ChannelSet& ch, const Grid1D& grid, const PhysicalModel& model) {
  require(ch.size() >= 2 && ch.eigenfunctions.size() == ch.size(), ErrorKind::shape,
          "coupling: need at least two solved dot states");
  for (const auto& f : ch.eigenfunctions) {
    require(f.size() == ch.grid.size(), ErrorKind::shape,
            "coupling: eigenfunction size differs from the dot grid");
  }
  const double reach = model.coulomb_coeff / 0.01;
  require(-grid.x_min >= reach && grid.x_max >= reach, ErrorKind::invalid_parameter,
          "coupling: wire grid must extend to |x| >= " + std::to_string(reach) +
              " nm, where the Coulomb tail drops below 0.01 meV");
}

}  // namespace

ChannelPotential coulomb_matrix(const ChannelSet& channels, const Grid1D& grid,
                                const DeviceGeometry& geom, const PhysicalModel& model,
                                const CouplingOptions& opts) {
  check_inputs(channels, grid, model);
  const std::size_t nc = channels.size();
  const Nodes nodes = collect_nodes(channels, opts.prune_fraction, 1);
  const double soft2 = geom.wire_half_width * geom.wire_half_width;
  ChannelPotential pot(grid, nc, Basis::dot_energy);
  parallel_for(grid.n, opts.threads, [&](std::size_t ix) {
    std::vector<double> acc(nodes.pairs);
    integrate(nodes, grid.x(ix), geom.d, soft2, model.coulomb_coeff, acc.data());
    std::size_t k = 0;
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t j = i; j < nc; ++j) pot.set_symmetric(ix, i, j, acc[k++]);
    }
  });
  return pot;
}

double quadrature_refinement_change(const ChannelSet& channels, const Grid1D& grid,
                                    const DeviceGeometry& geom, const PhysicalModel& model,
                                    std::size_t samples) {
  check_inputs(channels, grid, model);
  require(samples >= 2, ErrorKind::invalid_parameter, "coupling: need >= 2 refinement samples");
  const Nodes fine = collect_nodes(channels, 0.0, 1);
  const Nodes coarse = collect_nodes(channels, 0.0, 2);
  const double soft2 = geom.wire_half_width * geom.wire_half_width;
  std::vector<double> a(fine.pairs), b(fine.pairs);
  // Samples concentrate on the dot region, where the elements vary fastest.
  const double span = 4.0 * (geom.r + 5.0 * geom.s);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x2 = -span + 2.0 * span * static_cast<double>(s) / static_cast<double>(samples - 1);
    integrate(fine, x2, geom.d, soft2, model.coulomb_coeff, a.data());
    integrate(coarse, x2, geom.d, soft2, model.coulomb_coeff, b.data());
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
    }
  }
  return worst;
}

ChannelPotential channel_coupling(const ChannelSet& channels, const Grid1D& grid,
                                  const DeviceGeometry& geom, const PhysicalModel& model,
                                  const CouplingOptions& opts) {
  geom.validate();
  const double change =
      quadrature_refinement_change(channels, grid, geom, model, opts.refinement_samples);
  if (change > opts.refinement_tol) {
    std::ostringstream msg;
    msg << "coupling: quadrature changes by " << change * 100.0
        << " % under dot-grid refinement (limit " << opts.refinement_tol * 100.0 << " %)";
    fail(ErrorKind::accuracy, msg.str());
  }
  ChannelPotential pot = coulomb_matrix(channels, grid, geom, model, opts);
  for (std::size_t ix = 0; ix < grid.n; ++ix) {
    const double vw = wire_potential(grid.x(ix), geom);
    for (std::size_t i = 0; i < pot.n_ch; ++i) pot.at(ix, i, i) += vw + channels.energies[i];
  }
  return pot;
}

ChannelPotential rotate_basis(const ChannelPotential& potential, const Eigen::Matrix2d& transform,
                              Basis from) {
  require(potential.basis == from, ErrorKind::representation,
          "rotate_basis: potential is not in the transform's source basis");
  require(potential.n_ch >= 2, ErrorKind::shape, "rotate_basis: fewer than two channels");
  ChannelPotential out = potential;
  out.basis = from == Basis::dot_energy ? Basis::qubit : Basis::dot_energy;
  const std::size_t nc = potential.n_ch;
  for (std::size_t ix = 0; ix < potential.grid.n; ++ix) {
    Eigen::Matrix2d blk;
    blk << potential.at(ix, 0, 0), potential.at(ix, 0, 1), potential.at(ix, 1, 0),
        potential.at(ix, 1, 1);
    const Eigen::Matrix2d r = transform.transpose() * blk * transform;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) out.at(ix, i, j) = r(i, j);
    }
    // Rows coupling the qubit block to higher channels rotate on one side.
    for (std::size_t k = 2; k < nc; ++k) {
      const Eigen::Vector2d col(potential.at(ix, 0, k), potential.at(ix, 1, k));
      const Eigen::Vector2d rc = transform.transpose() * col;
      out.set_symmetric(ix, 0, k, rc(0));
      out.set_symmetric(ix, 1, k, rc(1));
    }
  }
  return out;
}

CsvTable channel_potential_table(const ChannelPotential& potential) {
  CsvTable t;
  t.header.push_back("x_nm");
  for (std::size_t i = 0; i < potential.n_ch; ++i) {
    for (std::size_t j = i; j < potential.n_ch; ++j) {
      t.header.push_back("V_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  for (std::size_t ix = 0; ix < potential.grid.n; ++ix) {
    std::vector<double> row{potential.grid.x(ix)};
    for (std::size_t i = 0; i < potential.n_ch; ++i) {
      for (std::size_t j = i; j < potential.n_ch; ++j) row.push_back(potential.at(ix, i, j));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace qpr
