#include <gtest/gtest.h>

#include <random>

#include "qpr/polar.hpp"

using namespace qpr;
using Mat2 = Eigen::Matrix2cd;

namespace {

Mat2 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat2 a;
  for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = {n(rng), n(rng)};
  return a;
}

void expect_valid(const Mat2& A, const PolarDecomposition& d, double tol) {
  EXPECT_LT((d.U * d.P - A).norm(), tol * std::max(1.0, A.norm()));
  EXPECT_LT((d.U.adjoint() * d.U - Mat2::Identity()).norm(), tol);
  EXPECT_LT((d.P - d.P.adjoint()).norm(), tol * std::max(1.0, A.norm()));
  Eigen::SelfAdjointEigenSolver<Mat2> es(d.P);
  EXPECT_GT(es.eigenvalues().minCoeff(), -tol * std::max(1.0, A.norm()));
}

}  // namespace

TEST(Polar, ThousandRandomMatrices) {
  std::mt19937_64 rng(20240611);
  for (int t = 0; t < 1000; ++t) {
    const Mat2 A = random_matrix(rng);
    const auto d = polar_decompose(A);
    expect_valid(A, d, 1e-12);
    // P agrees with the SVD-based square root of A^H A.
    Eigen::JacobiSVD<Mat2> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat2 P = svd.matrixV() * svd.singularValues().asDiagonal() * svd.matrixV().adjoint();
    EXPECT_LT((d.P - P).norm(), 1e-12 * A.norm());
  }
}

TEST(Polar, SingularRankOneAndZero) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Vector2cd u = random_matrix(rng).col(0), v = random_matrix(rng).col(1);
    const Mat2 A = u * v.adjoint();
    expect_valid(A, polar_decompose(A), 1e-12);
  }
  const auto z = polar_decompose(Mat2::Zero());
  EXPECT_LT((z.U - Mat2::Identity()).norm(), 1e-15);
  EXPECT_LT(z.P.norm(), 1e-15);
}

TEST(Polar, UnitaryAndPositiveInputs) {
  Mat2 U;
  U << std::polar(1.0, 0.3), 0, 0, std::polar(1.0, -1.1);
  const auto d = polar_decompose(U);
  EXPECT_LT((d.U - U).norm(), 1e-14);
  EXPECT_LT((d.P - Mat2::Identity()).norm(), 1e-14);
  Mat2 P;
  P << 2.0, Eigen::dcomplex(0.5, 0.2), Eigen::dcomplex(0.5, -0.2), 1.0;
  const auto e = polar_decompose(P);
  EXPECT_LT((e.U - Mat2::Identity()).norm(), 1e-14);
  EXPECT_LT((e.P - P).norm(), 1e-14);
}
