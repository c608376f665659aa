#pragma once

#include <Eigen/Dense>

namespace qpr {

struct PolarDecomposition {
  Eigen::Matrix2cd U;  ///< unitary
  Eigen::Matrix2cd P;  ///< (A^H A)^{1/2}
};

/// A = U P in closed form. With s = sqrt(||A||_F^2 + 2 |det A|):
///   P = (A^H A + |det A| I) / s,  U = (A + w adj(A)^H) / s,  w = det A / |det A|.
/// A singular A has U completed on the null space to the unitary nearest
/// the identity; A = 0 gives U = I, P = 0.
PolarDecomposition polar_decompose(const Eigen::Matrix2cd& A);

}  // namespace qpr
