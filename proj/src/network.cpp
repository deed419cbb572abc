#include "hpf/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hpf/error.hpp"

namespace hpf {

double TheveninSpec::reactance() const { return z_abs_ohm / std::sqrt(1.0 + r_over_x * r_over_x); }
double TheveninSpec::resistance() const { return r_over_x * reactance(); }
Complex TheveninSpec::impedance(int h) const { return {resistance(), h * reactance()}; }

HarmonicSignal TheveninSpec::emf(const HarmonicIndexSet& set) const {
  HarmonicSignal out(set, 3);
  const double peak = std::sqrt(2.0) * v_nominal_rms;
  for (const auto& [h, mp] : harmonics) {
    if (!set.contains(h)) continue;
    out.stacked() += balanced_set(set, h, peak * mp.first, mp.second).stacked();
  }
  return out;
}

int NetworkSpec::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return static_cast<int>(i);
  return -1;
}

void NetworkSpec::validate() const {
  std::set<std::string> seen;
  for (const auto& n : nodes)
    if (!seen.insert(n).second) throw Error(ErrorKind::Assembly, "duplicate node " + n);
  auto need = [&](const std::string& n, const char* what) {
    if (!seen.count(n)) throw Error(ErrorKind::Assembly, std::string(what) + " refers to unknown node " + n);
  };
  for (const auto& l : lines) {
    need(l.from, "line");
    need(l.to, "line");
    if (l.from == l.to) throw Error(ErrorKind::Assembly, "line " + l.from + "-" + l.to + " is a self loop");
    for (double v : {l.length_m, l.r_pos_ohm_per_km, l.r_zero_ohm_per_km, l.l_pos_h_per_km, l.l_zero_h_per_km,
                     l.c_pos_f_per_km, l.c_zero_f_per_km})
      if (v < 0.0) throw Error(ErrorKind::Assembly, "negative line parameter on " + l.from + "-" + l.to);
  }
  for (const auto& ld : loads) {
    need(ld.node, "load");
    const double sum = ld.weights[0] + ld.weights[1] + ld.weights[2];
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::Assembly, "load weights at " + ld.node + " do not sum to 1");
    if (!(ld.power_factor > 0.0 && ld.power_factor <= 1.0))
      throw Error(ErrorKind::Assembly, "load power factor at " + ld.node + " outside (0, 1]");
  }
  for (const auto& s : sources) {
    need(s.node, "source");
    if (!(s.z_abs_ohm > 0.0)) throw Error(ErrorKind::Assembly, "source impedance at " + s.node + " must be positive");
  }
}

std::string emf_node_name(const TheveninSpec& source) { return source.node + ".emf"; }

std::vector<std::string> electrical_nodes(const NetworkSpec& net) {
  std::vector<std::string> out = net.nodes;
  for (const auto& s : net.sources) out.push_back(emf_node_name(s));
  return out;
}

Matrix3cd fortescue() {
  const Complex a = std::polar(1.0, 2.0 * kPi / 3.0);
  Matrix3cd f;
  f << 1.0, 1.0, 1.0, 1.0, a * a, a, 1.0, a, a * a;
  return f;
}

PhaseBlocks sequence_to_phase(const LineSpec& line, double f) {
  const double w = 2.0 * kPi * f;
  const double s = line.length_m / 1000.0;
  const Complex j(0.0, 1.0);
  const Complex z0 = s * (line.r_zero_ohm_per_km + j * w * line.l_zero_h_per_km);
  const Complex z1 = s * (line.r_pos_ohm_per_km + j * w * line.l_pos_h_per_km);
  const Complex y0 = s * j * w * line.c_zero_f_per_km * 0.5;
  const Complex y1 = s * j * w * line.c_pos_f_per_km * 0.5;
  const Matrix3cd F = fortescue();
  const Matrix3cd Finv = F.inverse();
  PhaseBlocks out;
  out.z_series = F * Eigen::Vector3cd(z0, z1, z1).asDiagonal() * Finv;
  out.y_shunt_half = F * Eigen::Vector3cd(y0, y1, y1).asDiagonal() * Finv;
  return out;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> load_rl(const LoadSpec& load, double v_base_rms, double f1) {
  const double q = load.power_w * std::tan(std::acos(load.power_factor));
  Eigen::Vector3d r = Eigen::Vector3d::Zero(), l = Eigen::Vector3d::Zero();
  for (int p = 0; p < 3; ++p) {
    const double pp = load.weights[p] * load.power_w;
    const double qp = load.weights[p] * q;
    const double s2 = pp * pp + qp * qp;
    if (s2 == 0.0) continue;
    // Z = V^2 (P + jQ) / |S|^2
    r(p) = v_base_rms * v_base_rms * pp / s2;
    l(p) = v_base_rms * v_base_rms * qp / s2 / (2.0 * kPi * f1);
  }
  return {r, l};
}

Eigen::Vector3cd load_admittance(const LoadSpec& load, double v_base_rms, int h) {
  // X scales with h; f1 cancels in (R, X) so any positive value works here.
  const auto [r, l] = load_rl(load, v_base_rms, 1.0);
  Eigen::Vector3cd y = Eigen::Vector3cd::Zero();
  for (int p = 0; p < 3; ++p) {
    const Complex z(r(p), 2.0 * kPi * h * l(p));
    if (std::abs(z) > 0.0) y(p) = 1.0 / z;
  }
  return y;
}

namespace {

void stamp_series(MatrixXcd& y, int a, int b, const Matrix3cd& ybr) {
  y.block<3, 3>(3 * a, 3 * a) += ybr;
  y.block<3, 3>(3 * b, 3 * b) += ybr;
  y.block<3, 3>(3 * a, 3 * b) -= ybr;
  y.block<3, 3>(3 * b, 3 * a) -= ybr;
}

void check_connected(const NetworkSpec& net, const std::vector<std::string>& names) {
  const int n = static_cast<int>(names.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& l : net.lines) join(net.node_index(l.from), net.node_index(l.to));
  for (std::size_t s = 0; s < net.sources.size(); ++s)
    join(net.node_index(net.sources[s].node), static_cast<int>(net.nodes.size() + s));
  for (int i = 1; i < n; ++i)
    if (find(i) != find(0)) throw Error(ErrorKind::Assembly, "network is not connected at node " + names[i]);
}

}  // namespace

MatrixXcd assemble_admittance(const NetworkSpec& net, double f1, int h) {
  net.validate();
  const auto names = electrical_nodes(net);
  check_connected(net, names);
  const int n = static_cast<int>(names.size());
  MatrixXcd y = MatrixXcd::Zero(3 * n, 3 * n);
  for (const auto& l : net.lines) {
    const PhaseBlocks pb = sequence_to_phase(l, h * f1);
    const Eigen::FullPivLU<Matrix3cd> lu(pb.z_series);
    if (!lu.isInvertible())
      throw Error(ErrorKind::Assembly, "line " + l.from + "-" + l.to + " has a singular series impedance at h=" +
                                           std::to_string(h));
    const int a = net.node_index(l.from), b = net.node_index(l.to);
    stamp_series(y, a, b, lu.inverse());
    y.block<3, 3>(3 * a, 3 * a) += pb.y_shunt_half;
    y.block<3, 3>(3 * b, 3 * b) += pb.y_shunt_half;
  }
  for (const auto& ld : net.loads) {
    const int a = net.node_index(ld.node);
    y.block<3, 3>(3 * a, 3 * a) += load_admittance(ld, net.v_base_rms, h).asDiagonal();
  }
  for (std::size_t s = 0; s < net.sources.size(); ++s) {
    const Complex z = net.sources[s].impedance(h);
    stamp_series(y, net.node_index(net.sources[s].node), static_cast<int>(net.nodes.size() + s),
                 Matrix3cd::Identity() / z);
  }
  return y;
}

namespace {

std::vector<int> expand(const std::vector<int>& nodes) {
  std::vector<int> idx;
  for (int n : nodes)
    for (int p = 0; p < 3; ++p) idx.push_back(3 * n + p);
  return idx;
}

std::vector<int> complement(const std::vector<int>& keep, int n_nodes) {
  std::vector<char> kept(n_nodes, 0);
  for (int k : keep) {
    if (k < 0 || k >= n_nodes) throw Error(ErrorKind::Structural, "kept node index out of range");
    kept[k] = 1;
  }
  std::vector<int> out;
  for (int i = 0; i < n_nodes; ++i)
    if (!kept[i]) out.push_back(i);
  return out;
}

struct Split {
  MatrixXcd kk, ke, ek, ee;
};

Split split(const MatrixXcd& y, const std::vector<int>& keep) {
  if (y.rows() != y.cols() || y.rows() % 3 != 0) throw Error(ErrorKind::Structural, "admittance must be square 3n");
  const int n = static_cast<int>(y.rows() / 3);
  const auto k = expand(keep), e = expand(complement(keep, n));
  Split s;
  s.kk = y(k, k);
  s.ke = y(k, e);
  s.ek = y(e, k);
  s.ee = y(e, e);
  return s;
}

Eigen::PartialPivLU<MatrixXcd> checked_lu(const MatrixXcd& m, ErrorKind kind, const char* what) {
  Eigen::PartialPivLU<MatrixXcd> lu(m);
  if (m.size() > 0) {
    // Condition estimate plus pivot ratio; the estimate alone misses exact zero pivots.
    const double rc = lu.rcond();
    const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
    if (!(rc > 1e-14) || !(piv.minCoeff() > 1e-15 * piv.maxCoeff())) throw Error(kind, std::string(what) + " is singular (rcond " + std::to_string(rc) + ")");
  }
  return lu;
}

}  // namespace

MatrixXcd kron_reduce(const MatrixXcd& y, const std::vector<int>& keep_nodes) {
  const Split s = split(y, keep_nodes);
  if (s.ee.size() == 0) return s.kk;
  const auto lu = checked_lu(s.ee, ErrorKind::Reduction, "eliminated block");
  return s.kk - s.ke * lu.solve(s.ek);
}

MatrixXcd kron_recovery(const MatrixXcd& y, const std::vector<int>& keep_nodes) {
  const Split s = split(y, keep_nodes);
  if (s.ee.size() == 0) return MatrixXcd::Zero(0, s.kk.cols());
  const auto lu = checked_lu(s.ee, ErrorKind::Reduction, "eliminated block");
  return -lu.solve(s.ek);
}

HybridEntry hybrid_from_admittance(const MatrixXcd& y, int n_forming) {
  const Eigen::Index ns = 3 * n_forming;
  const Eigen::Index nr = y.rows() - ns;
  if (ns <= 0) throw Error(ErrorKind::Partition, "no grid-forming node");
  const MatrixXcd yss = y.topLeftCorner(ns, ns);
  const MatrixXcd ysr = y.topRightCorner(ns, nr);
  const MatrixXcd yrs = y.bottomLeftCorner(nr, ns);
  const MatrixXcd yrr = y.bottomRightCorner(nr, nr);
  const auto lu = checked_lu(yss, ErrorKind::Partition, "forming-node block Y_SS");
  HybridEntry h;
  h.ss = lu.inverse();
  h.sr = -h.ss * ysr;
  h.rs = yrs * h.ss;
  h.rr = yrr - yrs * h.ss * ysr;
  return h;
}

HybridGrid::HybridGrid(const NetworkSpec& net, const std::vector<std::string>& following, const HarmonicIndexSet& set)
    : set_(set), following_(following), sources_(net.sources) {
  net.validate();
  if (net.sources.empty()) throw Error(ErrorKind::Partition, "network has no Thevenin source");
  const auto names = electrical_nodes(net);
  std::vector<int> keep;
  for (const auto& s : net.sources) {
    forming_.push_back(emf_node_name(s));
    keep.push_back(static_cast<int>(std::find(names.begin(), names.end(), forming_.back()) - names.begin()));
  }
  std::set<std::string> seen;
  for (const auto& f : following) {
    const int idx = net.node_index(f);
    if (idx < 0) throw Error(ErrorKind::Partition, "following node " + f + " is not in the network");
    if (!seen.insert(f).second) throw Error(ErrorKind::Partition, "following node " + f + " listed twice");
    keep.push_back(idx);
  }
  for (int e : complement(keep, static_cast<int>(names.size()))) eliminated_.push_back(names[e]);

  entries_.resize(set.size());
  recovery_.resize(set.size());
  for (int h = 0; h <= set.h_max(); ++h) {
    const MatrixXcd y = assemble_admittance(net, set.f1(), h);
    entries_[set.position(h)] = hybrid_from_admittance(kron_reduce(y, keep), static_cast<int>(net.sources.size()));
    recovery_[set.position(h)] = kron_recovery(y, keep);
    if (h > 0) {
      const HybridEntry& e = entries_[set.position(h)];
      entries_[set.position(-h)] = {e.ss.conjugate(), e.sr.conjugate(), e.rs.conjugate(), e.rr.conjugate()};
      recovery_[set.position(-h)] = recovery_[set.position(h)].conjugate();
    }
  }
}

}  // namespace hpf
