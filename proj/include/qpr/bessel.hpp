#pragma once

#include <cstddef>
#include <vector>

namespace qpr {

/// J_0(x) .. J_nmax(x) by Miller's backward recurrence normalised with
/// J_0 + 2 sum_k J_2k = 1. Accurate for all orders including n >> x.
std::vector<double> bessel_j_sequence(double x, std::size_t nmax);

/// exp(-x) I_0(x) .. exp(-x) I_nmax(x) for x >= 0, normalised with
/// I_0 + 2 sum_n I_n = exp(x). Never overflows.
std::vector<double> scaled_bessel_i_sequence(double x, std::size_t nmax);

}  // namespace qpr
