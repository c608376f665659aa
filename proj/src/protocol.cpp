#include "qpr/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qpr/error.hpp"
#include "qpr/polar.hpp"

namespace qpr {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Super = Eigen::Matrix4cd;

Eigen::Vector4cd vec(const Mat2& m) { return Eigen::Map<const Eigen::Vector4cd>(m.data()); }

Mat2 unvec(const Eigen::Vector4cd& v) {
  Mat2 m;
  Eigen::Map<Eigen::Vector4cd>(m.data()) = v;
  return m;
}

Mat2 effect_of(const std::vector<Eigen::MatrixXcd>& ops) {
  Mat2 e = Mat2::Zero();
  for (const auto& b : ops) e += b.adjoint() * b;
  return 0.5 * (e + e.adjoint());
}

/// Qubit-block superoperator and leak functional of one outcome.
struct Branch {
  Super S = Super::Zero();
  Mat2 G = Mat2::Zero();  ///< leak = Re Tr(G rho)
  double share = 0.0;     ///< fraction of leaked weight that lands here
};

Branch make_branch(const std::vector<Eigen::MatrixXcd>& ops, double share) {
  Branch br;
  br.share = share;
  for (const auto& b : ops) {
    const Mat2 q = b.topRows(2);
    for (int c = 0; c < 2; ++c) {
      for (int r = 0; r < 2; ++r) {
        // vec(q rho q^H) = (conj(q) kron q) vec(rho)
        br.S.block<2, 2>(2 * c, 2 * r) += std::conj(q(c, r)) * q;
      }
    }
    if (b.rows() > 2) {
      const Eigen::MatrixXcd rest = b.bottomRows(b.rows() - 2);
      br.G += rest.adjoint() * rest;
    }
  }
  return br;
}

}  // namespace

MeasurementMap make_measurement_map(std::vector<Eigen::MatrixXcd> plus,
                                    std::vector<Eigen::MatrixXcd> minus) {
  MeasurementMap m;
  for (const auto* list : {&plus, &minus}) {
    for (const auto& b : *list) {
      require(b.cols() == 2 && b.rows() >= 2, ErrorKind::shape,
              "measurement map: operators must be n_ch x 2 with n_ch >= 2");
      if (m.n_ch == 0) m.n_ch = static_cast<std::size_t>(b.rows());
      require(static_cast<std::size_t>(b.rows()) == m.n_ch, ErrorKind::shape,
              "measurement map: operators have different row counts");
    }
  }
  m.plus = std::move(plus);
  m.minus = std::move(minus);
  m.E_plus = effect_of(m.plus);
  m.E_minus = effect_of(m.minus);
  Eigen::SelfAdjointEigenSolver<Mat2> es(m.E_plus + m.E_minus - Mat2::Identity());
  m.defect = es.eigenvalues().cwiseAbs().maxCoeff();
  for (const auto* e : {&m.E_plus, &m.E_minus}) {
    if (e->trace().real() < 1e-14) {
      m.degenerate = true;
      m.warnings.push_back("measurement map: one outcome carries no probability");
      break;
    }
  }
  return m;
}

MeasurementMap build_povm(const KrausSet& kraus) {
  std::vector<Eigen::MatrixXcd> plus, minus;
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    Eigen::MatrixXcd b = std::sqrt(kraus.weight[k]) * kraus.A[k];
    (kraus.p[k] > 0.0 ? plus : minus).push_back(std::move(b));
  }
  return make_measurement_map(std::move(plus), std::move(minus));
}

FeedbackPolicy policy_from_operators(const Mat2& A_plus, const Mat2& A_minus,
                                     PolicyVariant variant) {
  FeedbackPolicy pol;
  pol.variant = variant;
  pol.A_plus = A_plus;
  pol.A_minus = A_minus;
  const auto dp = polar_decompose(A_plus);
  const auto dm = polar_decompose(A_minus);
  pol.W_plus = dp.U.adjoint();
  pol.W_minus = dm.U.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat2> es(dp.P);
  const auto& ev = es.eigenvalues();  // ascending
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(1)));
  if (std::abs(ev(1) - ev(0)) < 1e-8 * std::max(scale, 1e-300) || scale == 0.0) {
    pol.warnings.push_back("feedback policy: degenerate P, basis change left at identity");
    pol.V = Mat2::Identity();
    return pol;
  }
  Mat2 v;
  v.col(0) = es.eigenvectors().col(1);
  v.col(1) = es.eigenvectors().col(0);
  for (int c = 0; c < 2; ++c) {
    const auto lead = v(0, c);
    if (std::abs(lead) > 0.0) {
      v.col(c) *= std::conj(lead) / std::abs(lead);
    } else {
      const auto second = v(1, c);
      v.col(c) *= std::conj(second) / std::abs(second);
    }
  }
  pol.V = v;
  return pol;
}

FeedbackPolicy build_feedback_policy(const KrausSet& kraus, PolicyVariant variant) {
  require(kraus.size() > 0, ErrorKind::invalid_parameter, "feedback policy: empty Kraus set");
  const std::size_t ip = kraus.nearest(kraus.p0);
  const std::size_t im = kraus.nearest(-kraus.p0);
  require(kraus.p[ip] > 0.0 && kraus.p[im] < 0.0, ErrorKind::invalid_parameter,
          "feedback policy: lattice lacks the central momentum on one side");
  FeedbackPolicy pol = policy_from_operators(kraus.A[ip].topRows(2), kraus.A[im].topRows(2), variant);
  pol.p0 = kraus.p[ip];
  return pol;
}

BranchTree simulate_protocol(const Mat2& rho, const MeasurementMap& map,
                             const std::optional<FeedbackPolicy>& policy, std::size_t n_cycles,
                             const ProtocolOptions& opts) {
  require(n_cycles >= 1 && n_cycles <= 12, ErrorKind::invalid_parameter,
          "protocol: cycle count must lie in [1, 12]");
  require((rho - rho.adjoint()).norm() < 1e-10 && std::abs(rho.trace() - 1.0) < 1e-10,
          ErrorKind::invalid_parameter, "protocol: rho must be Hermitian with unit trace");
  Eigen::SelfAdjointEigenSolver<Mat2> es(rho);
  require(es.eigenvalues().minCoeff() > -1e-10, ErrorKind::invalid_parameter,
          "protocol: rho must be positive");

  const double t_plus = std::clamp(0.5 * map.E_plus.trace().real(), 0.0, 1.0);
  const Branch branches[2] = {make_branch(map.minus, 1.0 - t_plus), make_branch(map.plus, t_plus)};
  const Mat2 W[2] = {policy ? policy->W_minus : Mat2::Identity(),
                     policy ? policy->W_plus : Mat2::Identity()};

  BranchTree tree;
  tree.levels.resize(n_cycles);
  std::vector<double> pruned_at(n_cycles, 0.0);

  struct Node {
    Mat2 rho;
    double leaked;
    double prob;
    std::uint32_t record;
  };
  // Outcome 0 (reflection) is expanded before outcome 1.
  auto expand = [&](auto&& self, const Node& node, std::size_t depth) -> void {
    if (depth == n_cycles) return;
    Mat2 in = node.rho;
    if (policy && (depth == 0 || policy->variant == PolicyVariant::rotate_every_cycle)) {
      in = policy->V * in * policy->V.adjoint();
    }
    for (int o = 0; o < 2; ++o) {
      const Branch& br = branches[o];
      Mat2 out = unvec(br.S * vec(in));
      const double leak = (br.G * in).trace().real() + node.leaked * br.share;
      const double p = out.trace().real() + leak;
      const double child_prob = node.prob * p;
      if (!(child_prob >= opts.prune_below)) {
        pruned_at[depth] += child_prob;
        continue;
      }
      out /= p;
      out = 0.5 * (out + out.adjoint()).eval();
      if (policy) out = W[o] * out * W[o].adjoint();
      Node child{out, leak / p, child_prob, (node.record << 1) | static_cast<std::uint32_t>(o)};
      BranchLevel& lvl = tree.levels[depth];
      lvl.records.push_back(child.record);
      lvl.probability.push_back(child.prob);
      lvl.rho.push_back(child.rho);
      lvl.leaked.push_back(child.leaked);
      self(self, child, depth + 1);
    }
  };
  expand(expand, Node{rho, 0.0, 1.0, 0}, 0);

  // Depth-first order interleaves levels; sort each level by record.
  for (auto& lvl : tree.levels) {
    std::vector<std::size_t> idx(lvl.records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return lvl.records[a] < lvl.records[b]; });
    BranchLevel sorted;
    for (std::size_t i : idx) {
      sorted.records.push_back(lvl.records[i]);
      sorted.probability.push_back(lvl.probability[i]);
      sorted.rho.push_back(lvl.rho[i]);
      sorted.leaked.push_back(lvl.leaked[i]);
    }
    lvl = std::move(sorted);
  }
  tree.pruned_mass.resize(n_cycles);
  double acc = 0.0;
  for (std::size_t d = 0; d < n_cycles; ++d) {
    acc += pruned_at[d];
    tree.pruned_mass[d] = acc;
  }
  return tree;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

namespace {

std::vector<double> normalised(std::vector<double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  if (s > 0.0) {
    for (double& v : p) v /= s;
  }
  return p;
}

}  // namespace

std::vector<double> residual_uncertainty(const BranchTree& tree0, const BranchTree& tree1) {
  require(tree0.depth() == tree1.depth(), ErrorKind::shape,
          "residual_uncertainty: trees have different depths");
  std::vector<double> F(tree0.depth());
  for (std::size_t d = 0; d < tree0.depth(); ++d) {
    const auto& a = tree0.levels[d];
    const auto& b = tree1.levels[d];
    std::vector<double> pa, pb;
    std::size_t i = 0, j = 0;
    while (i < a.records.size() || j < b.records.size()) {
      if (j == b.records.size() || (i < a.records.size() && a.records[i] < b.records[j])) {
        pa.push_back(a.probability[i++]);
        pb.push_back(0.0);
      } else if (i == a.records.size() || b.records[j] < a.records[i]) {
        pa.push_back(0.0);
        pb.push_back(b.probability[j++]);
      } else {
        pa.push_back(a.probability[i++]);
        pb.push_back(b.probability[j++]);
      }
    }
    pa = normalised(std::move(pa));
    pb = normalised(std::move(pb));
    std::vector<double> mix(pa.size());
    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = 0.5 * (pa[k] + pb[k]);
    const double m = entropy_bits(mix) - 0.5 * (entropy_bits(pa) + entropy_bits(pb));
    F[d] = std::clamp(1.0 - m, 0.0, 1.0);
  }
  return F;
}

std::vector<double> probability_defect(const BranchTree& tree0, const BranchTree& tree1) {
  require(tree0.depth() == tree1.depth(), ErrorKind::shape,
          "probability_defect: trees have different depths");
  std::vector<double> out(tree0.depth());
  for (std::size_t d = 0; d < tree0.depth(); ++d) {
    double worst = 0.0;
    for (const BranchTree* t : {&tree0, &tree1}) {
      double s = t->pruned_mass[d];
      for (double p : t->levels[d].probability) s += p;
      worst = std::max(worst, std::abs(s - 1.0));
    }
    out[d] = worst;
  }
  return out;
}

void check_measurement_window(std::size_t n_cycles, double cycle_time, double rabi_period) {
  const double total = static_cast<double>(n_cycles) * cycle_time;
  if (!(total < rabi_period / 20.0)) {
    std::ostringstream msg;
    msg << "protocol: " << n_cycles << " cycles take " << total
        << " hbar/meV, not below T_R/20 = " << rabi_period / 20.0;
    fail(ErrorKind::invalid_parameter, msg.str());
  }
}

}  // namespace qpr
