#include "qpr/polar.hpp"

#include <cmath>
#include <complex>

namespace qpr {

namespace {

using cd = std::complex<double>;

/// adj(A)^H for a 2x2 matrix.
Eigen::Matrix2cd adjugate_adjoint(const Eigen::Matrix2cd& a) {
  Eigen::Matrix2cd adj;
  adj << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return adj.adjoint();
}

/// Rank <= 1: A = s u v^H, U = u v^H + c u2 v2^H with |c| = 1 chosen to
/// maximise Re Tr U.
Eigen::Matrix2cd singular_completion(const Eigen::Matrix2cd& a) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector2cd u1 = svd.matrixU().col(0);
  const Eigen::Vector2cd u2 = svd.matrixU().col(1);
  const Eigen::Vector2cd v1 = svd.matrixV().col(0);
  const Eigen::Vector2cd v2 = svd.matrixV().col(1);
  const cd overlap = v2.dot(u2);  // v2^H u2 = Tr(u2 v2^H)
  const cd c = std::abs(overlap) > 1e-300 ? std::conj(overlap) / std::abs(overlap) : cd(1.0);
  return u1 * v1.adjoint() + c * u2 * v2.adjoint();
}

}  // namespace

PolarDecomposition polar_decompose(const Eigen::Matrix2cd& A) {
  const double fro2 = A.squaredNorm();
  if (fro2 == 0.0) return {Eigen::Matrix2cd::Identity(), Eigen::Matrix2cd::Zero()};
  const cd det = A.determinant();
  const double adet = std::abs(det);
  const double s = std::sqrt(fro2 + 2.0 * adet);
  PolarDecomposition out;
  out.P = (A.adjoint() * A + adet * Eigen::Matrix2cd::Identity()) / s;
  out.P = 0.5 * (out.P + out.P.adjoint()).eval();
  if (adet <= 1e-14 * fro2) {
    out.U = singular_completion(A);
  } else {
    out.U = (A + (det / adet) * adjugate_adjoint(A)) / s;
  }
  return out;
}

}  // namespace qpr
