#pragma once

// Repeated pump/measure/feedback cycles on the charge qubit.
//
// Each cycle maps the unnormalised qubit block rho and the leaked
// population l (channels >= 2) as
//   rho_pm = sum_{k in pm} B_k rho B_k^H,   B_k = sqrt(dp) A_k restricted to rows 0, 1
//   l_pm   = sum_{k in pm} Tr[C_k rho C_k^H] + l t_pm
// with C_k the remaining rows. Leaked weight evolves trivially and is split
// between the outcomes by t_+ = Tr(E_+)/2, t_- = 1 - t_+.

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpr/scattering.hpp"

namespace qpr {

struct MeasurementMap {
  std::size_t n_ch = 0;
  std::vector<Eigen::MatrixXcd> plus;   ///< sqrt(dp) A_p for p > 0
  std::vector<Eigen::MatrixXcd> minus;  ///< sqrt(dp) A_p for p <= 0
  Eigen::Matrix2cd E_plus = Eigen::Matrix2cd::Zero();
  Eigen::Matrix2cd E_minus = Eigen::Matrix2cd::Zero();
  double defect = 0.0;  ///< ||E_+ + E_- - I||_2
  bool degenerate = false;  ///< one outcome has no operators at all
  std::vector<std::string> warnings;
};

/// Splits the lattice by sign(p), with p = 0 counted as reflected.
MeasurementMap build_povm(const KrausSet& kraus);

/// Two-outcome map from explicit operator lists (rows beyond the qubit block allowed).
MeasurementMap make_measurement_map(std::vector<Eigen::MatrixXcd> plus,
                                    std::vector<Eigen::MatrixXcd> minus);

enum class PolicyVariant {
  rotate_once,         ///< V before the first cycle only
  rotate_every_cycle,  ///< V before every cycle
};

struct FeedbackPolicy {
  Eigen::Matrix2cd V = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd W_plus = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd W_minus = Eigen::Matrix2cd::Identity();
  PolicyVariant variant = PolicyVariant::rotate_once;
  double p0 = 0.0;
  Eigen::Matrix2cd A_plus = Eigen::Matrix2cd::Zero();   ///< qubit block at +p0
  Eigen::Matrix2cd A_minus = Eigen::Matrix2cd::Zero();  ///< qubit block at the mirror point
  std::vector<std::string> warnings;
};

/// Policy from a pair of central operators: V = eigenvectors of P_+
/// (descending eigenvalue, first row real non-negative), W_pm = U_pm^H.
FeedbackPolicy policy_from_operators(const Eigen::Matrix2cd& A_plus,
                                     const Eigen::Matrix2cd& A_minus,
                                     PolicyVariant variant = PolicyVariant::rotate_once);

/// Central operators taken at p0 and the lattice point nearest -p0.
/// Throws ErrorKind::invalid_parameter if the lattice has no point on one side.
FeedbackPolicy build_feedback_policy(const KrausSet& kraus,
                                     PolicyVariant variant = PolicyVariant::rotate_once);

/// Records are bit strings of length n; bit n-1-c (most significant first)
/// holds cycle c, 1 for a transmission (+).
struct BranchLevel {
  std::vector<std::uint32_t> records;  ///< ascending
  std::vector<double> probability;     ///< P(w | input)
  std::vector<Eigen::Matrix2cd> rho;   ///< normalised conditional qubit block
  std::vector<double> leaked;          ///< normalised leaked population
};

struct BranchTree {
  std::vector<BranchLevel> levels;   ///< levels[n - 1] holds depth n
  std::vector<double> pruned_mass;   ///< cumulative, per depth

  std::size_t depth() const { return levels.size(); }
};

struct ProtocolOptions {
  double prune_below = 1e-15;
};

/// Depth-first expansion of all records up to n_cycles (<= 12).
/// Throws ErrorKind::invalid_parameter for an invalid rho or cycle count.
BranchTree simulate_protocol(const Eigen::Matrix2cd& rho, const MeasurementMap& map,
                             const std::optional<FeedbackPolicy>& policy, std::size_t n_cycles,
                             const ProtocolOptions& opts = {});

double binary_entropy(double p);

/// Shannon entropy in bits of a probability list; zero entries ignored.
double entropy_bits(const std::vector<double>& p);

/// F(n) = 1 - M(n) for equiprobable inputs |0>, |1>, n = 1 .. depth.
std::vector<double> residual_uncertainty(const BranchTree& tree0, const BranchTree& tree1);

/// max over the two inputs of |sum_w P(w) + pruned - 1| at each depth.
std::vector<double> probability_defect(const BranchTree& tree0, const BranchTree& tree1);

/// Throws ErrorKind::invalid_parameter unless n_cycles * cycle_time < rabi_period / 20.
void check_measurement_window(std::size_t n_cycles, double cycle_time, double rabi_period);

}  // namespace qpr
