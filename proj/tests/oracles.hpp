#pragma once

// Reference implementations used only by the tests. None of them calls the
// library code they are compared against.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

/// Free Gaussian under H = -K d2/dx2 with psi(x, 0) proportional to
/// exp(-(x - x0)^2 / (4 s^2) + i k0 (x - x0)).
inline cplx free_gaussian(double x, double t, double K, double s, double x0, double k0) {
  const cplx a(1.0, K * t / (s * s));
  const double v = 2.0 * K * k0;
  const double xi = x - x0 - v * t;
  const cplx expo = -xi * xi / (4.0 * s * s * a) + cplx(0.0, k0 * (x - x0) - K * k0 * k0 * t);
  return std::pow(2.0 * pi * s * s, -0.25) / std::sqrt(a) * std::exp(expo);
}

/// Transmission through v sech^2(x / s) for H = -K d2/dx2 + V.
inline double eckart_transmission(double E, double v, double s, double K) {
  const double k = std::sqrt(E / K);
  const double sh = std::sinh(pi * k * s);
  const double arg = 4.0 * v * s * s / K - 1.0;
  const double c = arg >= 0.0 ? std::cosh(0.5 * pi * std::sqrt(arg)) : std::cos(0.5 * pi * std::sqrt(-arg));
  return sh * sh / (sh * sh + c * c);
}

/// Stationary transmission by fixed-step RK4 from x = +L (pure outgoing
/// wave) back to x = -L, where V has decayed.
inline double stationary_transmission(const std::function<double(double)>& V, double E, double K,
                                      double L, std::size_t steps = 40000) {
  const double k = std::sqrt(E / K);
  using State = Eigen::Vector<cplx, 2>;
  auto f = [&](double x, const State& y) {
    State d;
    d(0) = y(1);
    d(1) = (V(x) - E) / K * y(0);
    return d;
  };
  State y;
  y(0) = std::exp(cplx(0.0, k * L));
  y(1) = cplx(0.0, k) * y(0);
  const double h = -2.0 * L / static_cast<double>(steps);
  double x = L;
  for (std::size_t i = 0; i < steps; ++i) {
    const State k1 = f(x, y);
    const State k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    const State k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    const State k4 = f(x + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += h;
  }
  // psi = A e^{ikx} + B e^{-ikx} at x = -L.
  const cplx A = 0.5 * (y(0) + y(1) / cplx(0.0, k)) * std::exp(cplx(0.0, k * L));
  return 1.0 / std::norm(A);
}

/// Average of T(E(k)) over the Gaussian |phi(k)|^2 with centre k0 and std dev sk.
inline double packet_average(const std::function<double(double)>& T_of_E, double K, double k0,
                             double sk, std::size_t nodes = 801) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double u = -6.0 + 12.0 * static_cast<double>(i) / static_cast<double>(nodes - 1);
    const double k = k0 + u * sk;
    if (k <= 0.0) continue;
    const double w = std::exp(-0.5 * u * u) * ((i == 0 || i + 1 == nodes) ? 0.5 : 1.0);
    num += w * T_of_E(K * k * k);
    den += w;
  }
  return num / den;
}

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Mutual information of a binary channel with equiprobable inputs and
/// P(+ | 0) = a, P(+ | 1) = b.
inline double binary_channel_information(double a, double b) {
  return h2(0.5 * (a + b)) - 0.5 * (h2(a) + h2(b));
}

/// Brute-force two-outcome protocol: every record of length n is built by
/// explicit operator products. ops[o] lists the Kraus operators (qubit
/// block) of outcome o (0 = '-', 1 = '+'); feedback W[o] follows outcome o,
/// V precedes the first cycle. Returns F(n) for equiprobable |0>, |1>.
inline double brute_force_residual(const std::vector<std::vector<Eigen::Matrix2cd>>& ops,
                                   const Eigen::Matrix2cd& V, const Eigen::Matrix2cd W[2],
                                   bool feedback, int n) {
  std::vector<double> p0, p1;
  for (std::uint32_t rec = 0; rec < (1u << n); ++rec) {
    double p[2];
    for (int input = 0; input < 2; ++input) {
      Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
      rho(input, input) = 1.0;
      if (feedback) rho = V * rho * V.adjoint();
      for (int c = 0; c < n; ++c) {
        const int o = (rec >> (n - 1 - c)) & 1u;
        Eigen::Matrix2cd next = Eigen::Matrix2cd::Zero();
        for (const auto& B : ops[o]) next += B * rho * B.adjoint();
        rho = feedback ? Eigen::Matrix2cd(W[o] * next * W[o].adjoint()) : next;
      }
      p[input] = rho.trace().real();
    }
    p0.push_back(p[0]);
    p1.push_back(p[1]);
  }
  auto H = [](const std::vector<double>& q) {
    double h = 0.0;
    for (double x : q) {
      if (x > 0.0) h -= x * std::log2(x);
    }
    return h;
  };
  std::vector<double> mix(p0.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.5 * (p0[i] + p1[i]);
  return 1.0 - (H(mix) - 0.5 * (H(p0) + H(p1)));
}

}  // namespace oracle
