#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpr/dotsolver.hpp"

using namespace qpr;

namespace {

/// Spectral K k^2 as a dense real-space matrix on a periodic grid.
Eigen::MatrixXd dense_kinetic(const Grid1D& g, double K) {
  const auto k = g.wavenumbers();
  const int n = static_cast<int>(g.n);
  Eigen::MatrixXd T(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += K * k[m] * k[m] * std::cos(k[m] * (i - j) * g.dx);
      T(i, j) = s / n;
    }
  }
  return T;
}

Grid2D small_grid() { return make_grid_2d(-200.0, 200.0, 16, -340.0, 340.0, 32); }

}  // namespace

TEST(DotSolver, MatchesDenseDiagonalisation) {
  const Grid2D grid = small_grid();
  const DeviceGeometry geom = shipped_geometry();
  const PhysicalModel model = gaas_model();
  const Eigen::MatrixXd Tx = dense_kinetic(grid.x, model.kinetic_coeff);
  const Eigen::MatrixXd Ty = dense_kinetic(grid.y, model.kinetic_coeff);
  const int nx = static_cast<int>(grid.x.n), ny = static_cast<int>(grid.y.n);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nx * ny, nx * ny);
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const int a = ix * ny + iy;
      H(a, a) += dot_potential(grid.x.x(ix), grid.y.x(iy), geom, model);
      for (int jx = 0; jx < nx; ++jx) H(a, jx * ny + iy) += Tx(ix, jx);
      for (int jy = 0; jy < ny; ++jy) H(a, ix * ny + jy) += Ty(iy, jy);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const ChannelSet set = solve_dot_eigenstates(geom, model, grid);
  ASSERT_EQ(set.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(set.energies[i], es.eigenvalues()(static_cast<int>(i)), 1e-8) << i;
    EXPECT_LT(set.residuals[i], 1e-5);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < grid.size(); ++p) s += set.eigenfunctions[i][p] * set.eigenfunctions[j][p];
      s *= grid.cell_area();
      EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-10);
    }
  }
  EXPECT_LT(parity_defect(grid, set.eigenfunctions[0], +1), 1e-8);
  EXPECT_LT(parity_defect(grid, set.eigenfunctions[1], -1), 1e-8);
}

TEST(DotSolver, QubitBasisLocalisesOnWireSide) {
  const ChannelSet set = build_qubit_basis(solve_dot_eigenstates(shipped_geometry(), gaas_model(),
                                                                 make_grid_2d(-512, 512, 64, -512, 512, 64)));
  EXPECT_TRUE(set.has_qubit_basis);
  EXPECT_GT(set.one_localization, 0.99);
  EXPECT_NEAR(set.tunnel_splitting, set.energies[1] - set.energies[0], 1e-15);
  EXPECT_NEAR(set.rabi_period, 2 * oracle::pi / set.tunnel_splitting, 1e-6 * set.rabi_period);
  const auto& T = set.qubit_transform;
  EXPECT_NEAR((T.transpose() * T - Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-14);
}

TEST(DotSolver, RejectsUndersizedGrid) {
  EXPECT_THROW(solve_dot_eigenstates(shipped_geometry(), gaas_model(),
                                     make_grid_2d(-100, 100, 32, -100, 100, 32)),
               Error);
  DotSolverOptions opts;
  opts.max_iterations = 1;
  try {
    solve_dot_eigenstates(shipped_geometry(), gaas_model(), small_grid(), opts);
    FAIL() << "expected convergence failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::convergence);
  }
}
