#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpr/scattering.hpp"

using namespace qpr;

namespace {

double transmitted(const ChannelField& f) { return f.probability_between(0.0, f.grid.x_max); }

}  // namespace

TEST(Wavepacket, NormEnergyAndPlacement) {
  const PhysicalModel model = gaas_model();
  const Grid1D g = make_grid(-16384, 16384, 4096);
  const WavepacketSpec spec{2.0, 0.02};
  const auto psi = make_wavepacket(spec, g, model, 552.0);
  double n = 0.0;
  for (const auto& v : psi) n += std::norm(v) * g.dx;
  EXPECT_NEAR(n, 1.0, 1e-13);
  EXPECT_NEAR(kinetic_expectation(psi, g, model.kinetic_coeff), 2.0, 1e-9);
  const PacketShape s = packet_shape(spec, model, 552.0);
  EXPECT_NEAR(s.sigma_x * s.sigma_k, 0.5, 1e-15);
  EXPECT_NEAR(s.x0, -552.0 - 7 * s.sigma_x, 1e-9);
  EXPECT_NEAR(2 * model.kinetic_coeff * s.k0 * s.sigma_k / 2.0, 0.02, 2e-5);
}

TEST(Wavepacket, RejectsUnresolvedOrMisplacedPackets) {
  const PhysicalModel model = gaas_model();
  EXPECT_THROW(make_wavepacket({2.0, 0.02}, make_grid(-4096, 4096, 1024), model, 552.0), Error);
  EXPECT_THROW(make_wavepacket({60.0, 0.02}, make_grid(-16384, 16384, 1024), model, 552.0), Error);
  EXPECT_THROW(make_wavepacket({2.0, 0.3}, make_grid(-16384, 16384, 4096), model, 552.0), Error);
  WavepacketSpec misplaced{2.0, 0.02, -100.0};
  EXPECT_THROW(make_wavepacket(misplaced, make_grid(-16384, 16384, 4096), model, 552.0), Error);
}

TEST(Scattering, SingleBarrierMatchesEckart) {
  const PhysicalModel model = gaas_model();
  const DeviceGeometry geom = shipped_geometry();
  const Grid1D g = make_grid(-16384, 16384, 8192);
  ChannelPotential pot(g, 1);
  for (std::size_t i = 0; i < g.n; ++i) pot.at(i, 0, 0) = geom.v_x / std::pow(std::cosh(g.x(i) / geom.s), 2);
  const double W = 5 * geom.s + 200;
  for (double E : {1.5, 10.0}) {
    const WavepacketSpec spec{E, 0.02};
    const PacketShape shape = packet_shape(spec, model, W);
    const auto psi = make_wavepacket(spec, g, model, W);
    const ScatteringRun run = run_scattering(Eigen::VectorXd::Ones(1), psi, pot, model, shape, W, {});
    const double ref = oracle::packet_average(
        [&](double e) { return oracle::eckart_transmission(e, geom.v_x, geom.s, model.kinetic_coeff); },
        model.kinetic_coeff, shape.k0, shape.sigma_k);
    EXPECT_NEAR(transmitted(run.field), ref, 1e-3 * std::max(ref, 1e-2)) << E;
    EXPECT_LT(run.norm_drift, 1e-9);
    EXPECT_LT(run.window_probability, 1e-6);
  }
}

TEST(Scattering, UncoupledChannelsGiveDiagonalKraus) {
  const PhysicalModel model = gaas_model();
  const DeviceGeometry geom = shipped_geometry();
  const Grid1D g = make_grid(-16384, 16384, 4096);
  ChannelPotential pot(g, 3);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t c = 0; c < 3; ++c) pot.at(i, c, c) = wire_potential(g.x(i), geom) + 1e-4 * c;
  }
  const double W = geom.r + 5 * geom.s;
  const WavepacketSpec spec{2.0, 0.02};
  const PacketShape shape = packet_shape(spec, model, W);
  const auto psi = make_wavepacket(spec, g, model, W);
  ChannelField out[2];
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
    c(j) = 1.0;
    out[j] = run_scattering(c, psi, pot, model, shape, W, {}).field;
  }
  const KrausSet ks = extract_kraus(out[0], out[1], psi, Eigen::Matrix2d::Identity());
  EXPECT_LT(ks.completeness_defect, 1e-8);
  EXPECT_LT(ks.leakage, 1e-20);
  EXPECT_NEAR(ks.p0, shape.k0, g.dk());
  const double ref = oracle::packet_average(
      [&](double e) {
        return oracle::stationary_transmission([&](double x) { return wire_potential(x, geom); }, e,
                                               model.kinetic_coeff, geom.r + 25 * geom.s);
      },
      model.kinetic_coeff, shape.k0, shape.sigma_k, 201);
  EXPECT_NEAR(transmission_coefficient(0, ks), ref, 2e-3);
  EXPECT_NEAR(transmission_coefficient(1, ks), ref, 2e-3);
  // Only the Gaussian tail beyond the 3 sigma band, about 0.27 %.
  EXPECT_LT(inelastic_fraction(0, ks, shape), 6e-3);
  const std::size_t c = ks.nearest(ks.p0);
  EXPECT_LT(std::abs(ks.A[c](1, 0)), 1e-10 * std::abs(ks.A[c](0, 0)));
  EXPECT_THROW(transmission_coefficient(2, ks), Error);
  EXPECT_LT(factorization_spread(ks, 0, 0, ks.p0, shape.sigma_k), 0.5);
}

TEST(Scattering, NarrowSpreadFactorisesAcrossCentralBand) {
  const PhysicalModel model = gaas_model();
  const DeviceGeometry geom = shipped_geometry();
  const Grid1D g = make_grid(-65536, 65536, 8192);
  ChannelPotential pot(g, 2);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t c = 0; c < 2; ++c) pot.at(i, c, c) = wire_potential(g.x(i), geom) + 1e-4 * c;
  }
  const double W = geom.r + 5 * geom.s;
  const WavepacketSpec spec{3.0, 0.005};
  const PacketShape shape = packet_shape(spec, model, W);
  const auto psi = make_wavepacket(spec, g, model, W);
  ChannelField out[2];
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
    c(j) = 1.0;
    out[j] = run_scattering(c, psi, pot, model, shape, W, {}).field;
  }
  const KrausSet ks = extract_kraus(out[0], out[1], psi, Eigen::Matrix2d::Identity());
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LT(factorization_spread(ks, j, j, ks.p0, shape.sigma_k), 0.05);
    EXPECT_LT(factorization_spread(ks, j, j, -ks.p0, shape.sigma_k), 0.05);
  }
}

TEST(Scattering, EdgeAndTimeoutGuards) {
  const PhysicalModel model = gaas_model();
  const Grid1D g = make_grid(-8192, 8192, 2048);
  ChannelPotential pot(g, 1);
  const WavepacketSpec spec{2.0, 0.05};
  const double W = 600;
  const PacketShape shape = packet_shape(spec, model, W);
  const auto psi = make_wavepacket(spec, g, model, W);
  ScatteringOptions opts;
  opts.max_time = 8.0;
  try {
    run_scattering(Eigen::VectorXd::Ones(1), psi, pot, model, shape, W, opts);
    FAIL() << "expected timeout";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::timeout);
  }
  opts = {};
  opts.stop_fraction = 1e-300;
  opts.trapped_fraction = 0.0;
  try {
    run_scattering(Eigen::VectorXd::Ones(1), psi, pot, model, shape, W, opts);
    FAIL() << "expected edge abort";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::geometry);
  }
  opts = {};
  opts.stop_fraction = 1e-300;
  opts.settle_change = 0.0;
  const ScatteringRun run = run_scattering(Eigen::VectorXd::Ones(1), psi, pot, model, shape, W, opts);
  EXPECT_TRUE(run.trapped);
  EXPECT_LT(run.window_probability, opts.trapped_fraction);
  EXPECT_GT(run.max_edge_probability, opts.edge_fraction);
}
