#include "qpr/serialize.hpp"

#include "qpr/error.hpp"

namespace qpr {

namespace {

std::vector<double> grid_values(const Grid1D& g) {
  return {g.x_min, g.x_max, static_cast<double>(g.n)};
}

Grid1D grid_from(const std::vector<double>& v) {
  require(v.size() == 3, ErrorKind::integrity, "snapshot: malformed grid section");
  return make_grid(v[0], v[1], static_cast<std::size_t>(v[2]));
}

double scalar(const Snapshot& s, const std::string& name) {
  const auto& v = s.get(name);
  require(v.size() == 1, ErrorKind::integrity, "snapshot: " + name + " is not a scalar");
  return v[0];
}

}  // namespace

Snapshot to_snapshot(const ChannelSet& set, const std::string& key) {
  Snapshot s;
  s.key = key;
  s.add("grid_x", grid_values(set.grid.x));
  s.add("grid_y", grid_values(set.grid.y));
  s.add("energies", set.energies);
  s.add("residuals", set.residuals);
  std::vector<double> phi;
  for (const auto& f : set.eigenfunctions) phi.insert(phi.end(), f.begin(), f.end());
  s.add("eigenfunctions", std::move(phi));
  const auto& t = set.qubit_transform;
  s.add("qubit_transform", {t(0, 0), t(1, 0), t(0, 1), t(1, 1)});
  s.add("qubit", {set.has_qubit_basis ? 1.0 : 0.0, set.tunnel_splitting, set.rabi_period,
                  set.one_localization});
  return s;
}

ChannelSet channel_set_from(const Snapshot& snap) {
  ChannelSet set;
  set.grid = Grid2D{grid_from(snap.get("grid_x")), grid_from(snap.get("grid_y"))};
  set.energies = snap.get("energies");
  set.residuals = snap.get("residuals");
  const auto& phi = snap.get("eigenfunctions");
  const std::size_t n = set.grid.size();
  require(phi.size() == n * set.energies.size() && set.residuals.size() == set.energies.size(),
          ErrorKind::integrity, "snapshot: eigenfunction block has the wrong size");
  for (std::size_t i = 0; i < set.energies.size(); ++i) {
    set.eigenfunctions.emplace_back(phi.begin() + static_cast<std::ptrdiff_t>(i * n),
                                    phi.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  }
  const auto& t = snap.get("qubit_transform");
  const auto& q = snap.get("qubit");
  require(t.size() == 4 && q.size() == 4, ErrorKind::integrity, "snapshot: malformed qubit data");
  set.qubit_transform << t[0], t[2], t[1], t[3];
  set.has_qubit_basis = q[0] != 0.0;
  set.tunnel_splitting = q[1];
  set.rabi_period = q[2];
  set.one_localization = q[3];
  return set;
}

Snapshot to_snapshot(const ChannelPotential& pot, const std::string& key) {
  Snapshot s;
  s.key = key;
  s.add("grid", grid_values(pot.grid));
  s.add("n_ch", {static_cast<double>(pot.n_ch)});
  s.add("basis", {pot.basis == Basis::qubit ? 1.0 : 0.0});
  s.add("values", pot.values);
  return s;
}

ChannelPotential channel_potential_from(const Snapshot& snap) {
  ChannelPotential pot(grid_from(snap.get("grid")), static_cast<std::size_t>(scalar(snap, "n_ch")),
                       scalar(snap, "basis") != 0.0 ? Basis::qubit : Basis::dot_energy);
  const auto& v = snap.get("values");
  require(v.size() == pot.values.size(), ErrorKind::integrity, "snapshot: potential has the wrong size");
  pot.values = v;
  return pot;
}

void append_kraus(Snapshot& snap, const KrausSet& k) {
  snap.add("kraus_scalars", {static_cast<double>(k.n_ch), k.p0, k.completeness_defect, k.leakage,
                             k.discarded});
  snap.add("kraus_p", k.p);
  snap.add("kraus_weight", k.weight);
  snap.add("kraus_incident", k.incident);
  std::vector<double> a;
  a.reserve(k.size() * k.n_ch * 4);
  for (const auto& m : k.A) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.push_back(m(i, j).real());
        a.push_back(m(i, j).imag());
      }
    }
  }
  snap.add("kraus_A", std::move(a));
}

KrausSet kraus_from(const Snapshot& snap) {
  KrausSet k;
  const auto& sc = snap.get("kraus_scalars");
  require(sc.size() == 5, ErrorKind::integrity, "snapshot: malformed Kraus scalars");
  k.n_ch = static_cast<std::size_t>(sc[0]);
  k.p0 = sc[1];
  k.completeness_defect = sc[2];
  k.leakage = sc[3];
  k.discarded = sc[4];
  k.p = snap.get("kraus_p");
  k.weight = snap.get("kraus_weight");
  k.incident = snap.get("kraus_incident");
  const auto& a = snap.get("kraus_A");
  require(k.weight.size() == k.p.size() && k.incident.size() == k.p.size() &&
              a.size() == k.p.size() * k.n_ch * 4,
          ErrorKind::integrity, "snapshot: Kraus arrays have inconsistent sizes");
  std::size_t pos = 0;
  for (std::size_t q = 0; q < k.p.size(); ++q) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(k.n_ch), 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = {a[pos], a[pos + 1]};
        pos += 2;
      }
    }
    k.A.push_back(std::move(m));
  }
  return k;
}

CsvTable kraus_table(const KrausSet& k) {
  CsvTable t;
  t.header = {"p", "weight", "incident"};
  for (std::size_t i = 0; i < k.n_ch; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::string ij = std::to_string(i) + "_" + std::to_string(j);
      t.header.push_back("re_" + ij);
      t.header.push_back("im_" + ij);
    }
  }
  for (std::size_t q = 0; q < k.size(); ++q) {
    std::vector<double> row{k.p[q], k.weight[q], k.incident[q]};
    for (std::size_t i = 0; i < k.n_ch; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const auto v = k.A[q](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        row.push_back(v.real());
        row.push_back(v.imag());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Snapshot to_snapshot(const BranchTree& tree, const std::string& key) {
  Snapshot s;
  s.key = key;
  s.add("pruned_mass", tree.pruned_mass);
  for (std::size_t d = 0; d < tree.depth(); ++d) {
    const auto& lvl = tree.levels[d];
    const std::string tag = "depth_" + std::to_string(d + 1);
    std::vector<double> rec(lvl.records.begin(), lvl.records.end());
    s.add(tag + "_records", std::move(rec));
    s.add(tag + "_probability", lvl.probability);
    s.add(tag + "_leaked", lvl.leaked);
    std::vector<double> rho;
    for (const auto& m : lvl.rho) {
      for (int c = 0; c < 2; ++c) {
        for (int r = 0; r < 2; ++r) {
          rho.push_back(m(r, c).real());
          rho.push_back(m(r, c).imag());
        }
      }
    }
    s.add(tag + "_rho", std::move(rho));
  }
  return s;
}

}  // namespace qpr
