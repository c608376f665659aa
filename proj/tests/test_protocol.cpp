#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qpr/polar.hpp"
#include "qpr/protocol.hpp"

using namespace qpr;
using Mat2 = Eigen::Matrix2cd;

namespace {

Mat2 random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat2 a;
  for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = {n(rng), n(rng)};
  return Eigen::HouseholderQR<Mat2>(a).householderQ();
}

Mat2 pure(int j) {
  Mat2 r = Mat2::Zero();
  r(j, j) = 1.0;
  return r;
}

/// Two-operator instrument A_+ = U_+ sqrt(E), A_- = U_- sqrt(I - E), E
/// diagonal in a random basis with eigenvalues a, b.
std::pair<Mat2, Mat2> instrument(std::mt19937_64& rng, double a, double b) {
  const Mat2 R = random_unitary(rng);
  Mat2 sp = Mat2::Zero(), sm = Mat2::Zero();
  sp(0, 0) = std::sqrt(a);
  sp(1, 1) = std::sqrt(b);
  sm(0, 0) = std::sqrt(1 - a);
  sm(1, 1) = std::sqrt(1 - b);
  return {random_unitary(rng) * R * sp * R.adjoint(), random_unitary(rng) * R * sm * R.adjoint()};
}

}  // namespace

TEST(Protocol, EntropyHelpers) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_NEAR(entropy_bits({0.25, 0.25, 0.5}), 1.5, 1e-15);
  EXPECT_NEAR(binary_entropy(0.11), oracle::h2(0.11), 1e-15);
}

TEST(Protocol, SingleCycleIsBinaryChannel) {
  // Diagonal effects: P(+|0) = a, P(+|1) = b.
  const double a = 0.83, b = 0.07;
  Mat2 Ap = Mat2::Zero(), Am = Mat2::Zero();
  Ap(0, 0) = std::sqrt(a);
  Ap(1, 1) = std::sqrt(b);
  Am(0, 0) = std::sqrt(1 - a);
  Am(1, 1) = std::sqrt(1 - b);
  const auto map = make_measurement_map({Ap}, {Am});
  EXPECT_LT(map.defect, 1e-15);
  const auto t0 = simulate_protocol(pure(0), map, std::nullopt, 3);
  const auto t1 = simulate_protocol(pure(1), map, std::nullopt, 3);
  const auto F = residual_uncertainty(t0, t1);
  EXPECT_NEAR(F[0], 1 - oracle::binary_channel_information(a, b), 1e-14);
  for (double d : probability_defect(t0, t1)) EXPECT_LT(d, 1e-14);
  EXPECT_EQ(t0.levels[1].records, (std::vector<std::uint32_t>{0, 1, 2, 3}));
}

TEST(Protocol, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 20; ++t) {
    auto [Ap, Am] = instrument(rng, 0.6 + 0.3 * t / 20.0, 0.2);
    const auto map = make_measurement_map({Ap}, {Am});
    for (auto variant : {PolicyVariant::rotate_once}) {
      const FeedbackPolicy pol = policy_from_operators(Ap, Am, variant);
      const int n = 6;
      const auto F = residual_uncertainty(simulate_protocol(pure(0), map, pol, n),
                                          simulate_protocol(pure(1), map, pol, n));
      const auto G = residual_uncertainty(simulate_protocol(pure(0), map, std::nullopt, n),
                                          simulate_protocol(pure(1), map, std::nullopt, n));
      const Mat2 W[2] = {pol.W_minus, pol.W_plus};
      const std::vector<std::vector<Mat2>> ops = {{Am}, {Ap}};
      for (int k = 1; k <= n; ++k) {
        EXPECT_NEAR(F[k - 1], oracle::brute_force_residual(ops, pol.V, W, true, k), 1e-12);
        EXPECT_NEAR(G[k - 1], oracle::brute_force_residual(ops, pol.V, W, false, k), 1e-12);
      }
    }
  }
}

TEST(Protocol, LeakedWeightIsConserved) {
  Eigen::MatrixXcd Ap = Eigen::MatrixXcd::Zero(4, 2), Am = Eigen::MatrixXcd::Zero(4, 2);
  Ap(0, 0) = std::sqrt(0.7);
  Ap(1, 1) = std::sqrt(0.1);
  Am(0, 0) = std::sqrt(0.25);
  Am(1, 1) = std::sqrt(0.85);
  Am(2, 0) = std::sqrt(0.05);
  Am(3, 1) = std::sqrt(0.05);
  const auto map = make_measurement_map({Ap}, {Am});
  EXPECT_LT(map.defect, 1e-15);
  const auto t0 = simulate_protocol(pure(0), map, std::nullopt, 8);
  const auto t1 = simulate_protocol(pure(1), map, std::nullopt, 8);
  for (double d : probability_defect(t0, t1)) EXPECT_LT(d, 1e-13);
}

TEST(Protocol, FeedbackPolicyStructure) {
  std::mt19937_64 rng(5);
  auto [Ap, Am] = instrument(rng, 0.9, 0.1);
  const FeedbackPolicy pol = policy_from_operators(Ap, Am);
  EXPECT_LT((pol.W_plus * Ap - polar_decompose(Ap).P).norm(), 1e-12);
  EXPECT_LT((pol.V.adjoint() * pol.V - Mat2::Identity()).norm(), 1e-12);
  EXPECT_NEAR(pol.V(0, 0).imag(), 0.0, 1e-15);
  EXPECT_GE(pol.V(0, 0).real(), 0.0);
  const Mat2 d = pol.V.adjoint() * polar_decompose(Ap).P * pol.V;
  EXPECT_LT(std::abs(d(0, 1)), 1e-12);
  EXPECT_GT(d(0, 0).real(), d(1, 1).real());
  const FeedbackPolicy deg = policy_from_operators(Mat2::Identity() * 0.5, Mat2::Identity() * 0.5);
  EXPECT_FALSE(deg.warnings.empty());
  EXPECT_LT((deg.V - Mat2::Identity()).norm(), 1e-15);
}

TEST(Protocol, InputValidation) {
  const auto map = make_measurement_map({Mat2::Identity()}, {Mat2::Zero()});
  EXPECT_TRUE(map.degenerate);
  Mat2 bad = Mat2::Zero();
  bad(0, 0) = 2.0;
  EXPECT_THROW(simulate_protocol(bad, map, std::nullopt, 2), Error);
  EXPECT_THROW(simulate_protocol(pure(0), map, std::nullopt, 13), Error);
  EXPECT_THROW(check_measurement_window(10, 100.0, 20000.0), Error);
  EXPECT_NO_THROW(check_measurement_window(10, 90.0, 20000.0));
  Eigen::MatrixXcd wrong = Eigen::MatrixXcd::Zero(2, 3);
  EXPECT_THROW(make_measurement_map({wrong}, {}), Error);
}
