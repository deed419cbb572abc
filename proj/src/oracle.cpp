#include "hpf/oracle.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "hpf/error.hpp"

namespace hpf {

namespace {

constexpr double kSqrt23 = 0.81649658092772603273;  // sqrt(2/3)

struct Park {
  double c[3], s[3];
  explicit Park(double theta) {
    for (int k = 0; k < 3; ++k) {
      c[k] = kSqrt23 * std::cos(theta - 2.0 * kPi * k / 3.0);
      s[k] = kSqrt23 * std::sin(theta - 2.0 * kPi * k / 3.0);
    }
  }
  void to_dq(const double* abc, double& d, double& q) const {
    d = c[0] * abc[0] + c[1] * abc[1] + c[2] * abc[2];
    q = s[0] * abc[0] + s[1] * abc[1] + s[2] * abc[2];
  }
  void to_abc(double d, double q, double* abc) const {
    for (int k = 0; k < 3; ++k) abc[k] = c[k] * d + s[k] * q;
  }
};

Eigen::Matrix3d sequence_matrix(double zero, double pos) {
  const Matrix3cd F = fortescue();
  return (F * Eigen::Vector3cd(zero, pos, pos).asDiagonal() * F.inverse()).real();
}

}  // namespace

TdsCiderModel::TdsCiderModel(const TdsCider& spec, double f1) : spec_(spec), w1_(2.0 * kPi * f1) {
  spec_.params.validate();
  if (!(spec_.setpoints.v_dc > 0.0)) throw Error(ErrorKind::Model, "DC voltage setpoint must be positive");
}

void TdsCiderModel::derivatives(double t, const double* x, const Eigen::Vector3d& v_grid, double* dx,
                                Diagnostics* diag) const {
  const CiderParams& p = spec_.params;
  const Setpoints& sp = spec_.setpoints;
  const double* ia = x;
  const double* vf = x + 3;
  const double* ig = x + 6;
  const double vd = spec_.dc_side ? x[9] : sp.v_dc;
  const double* xi = x + 10;

  const Park park(w1_ * t);

  double ia_dq[2], vf_dq[2], ig_dq[2], vg_dq[2];
  park.to_dq(ia, ia_dq[0], ia_dq[1]);
  park.to_dq(vf, vf_dq[0], vf_dq[1]);
  park.to_dq(ig, ig_dq[0], ig_dq[1]);
  park.to_dq(v_grid.data(), vg_dq[0], vg_dq[1]);

  double ig_ref[2];
  double i_eps = 0.0, dc_error = 0.0;
  if (spec_.dc_side) {
    i_eps = sp.p_w / vd;
    dc_error = sp.v_dc - vd;
    ig_ref[0] = p.k_fb_delta_signed() * (dc_error + xi[6] / p.delta.t_fb) + p.delta.k_ft * i_eps + p.k_ff_delta() * sp.v_dc;
  } else {
    ig_ref[0] = sp.p_w / vg_dq[0];
  }
  ig_ref[1] = sp.q_var / vg_dq[0];

  double va_ref_dq[2];
  for (int a = 0; a < 2; ++a) {
    const double e3 = ig_ref[a] - ig_dq[a];
    const double vf_ref = p.gamma.k_fb * (e3 + xi[4 + a] / p.gamma.t_fb) + p.gamma.k_ft * vg_dq[a] + p.k_ff_gamma() * ig_ref[a];
    const double e2 = vf_ref - vf_dq[a];
    const double ia_ref = p.phi.k_fb * (e2 + xi[2 + a] / p.phi.t_fb) + p.phi.k_ft * ig_dq[a] + p.k_ff_phi() * vf_ref;
    const double e1 = ia_ref - ia_dq[a];
    va_ref_dq[a] = p.alpha.k_fb * (e1 + xi[a] / p.alpha.t_fb) + p.alpha.k_ft * vf_dq[a] + p.k_ff_alpha() * ia_ref;
    dx[10 + a] = e1;
    dx[12 + a] = e2;
    dx[14 + a] = e3;
  }
  dx[16] = spec_.dc_side ? dc_error : 0.0;

  double va_ref[3], va[3];
  park.to_abc(va_ref_dq[0], va_ref_dq[1], va_ref);
  double i_delta = 0.0;
  for (int k = 0; k < 3; ++k) {
    va[k] = spec_.dc_side ? va_ref[k] * vd / sp.v_dc : va_ref[k];
    i_delta += va_ref[k] * ia[k] / sp.v_dc;
  }
  for (int k = 0; k < 3; ++k) {
    dx[k] = (va[k] - vf[k] - p.r_alpha * ia[k]) / p.l_alpha;
    dx[3 + k] = (ia[k] - ig[k] - p.g_phi * vf[k]) / p.c_phi;
    dx[6 + k] = (vf[k] - v_grid(k) - p.r_gamma * ig[k]) / p.l_gamma;
  }
  dx[9] = spec_.dc_side ? (i_eps - i_delta - p.g_delta * vd) / p.c_delta : 0.0;

  if (diag) {
    for (int k = 0; k < 3; ++k) {
      diag->v_alpha(k) = va[k];
      diag->v_alpha_ref(k) = va_ref[k];
      diag->i_alpha(k) = ia[k];
    }
    diag->v_delta = vd;
    diag->i_delta = i_delta;
    diag->i_eps = i_eps;
  }
}

TimeDomainSimulator::TimeDomainSimulator(const NetworkSpec& net, const std::vector<TdsCider>& ciders, double f1)
    : net_(net), f1_(f1), w1_(2.0 * kPi * f1) {
  net_.validate();
  node_names_ = electrical_nodes(net_);
  const int n_net = static_cast<int>(net_.nodes.size());
  nodes_.resize(node_names_.size());
  for (std::size_t s = 0; s < net_.sources.size(); ++s) {
    nodes_[n_net + s].kind = Node::Source;
    nodes_[n_net + s].source = static_cast<int>(s);
  }

  int offset = 0;
  auto add_branch = [&](int a, int b, const Eigen::Matrix3d& r, const Eigen::Matrix3d& l) {
    Branch br;
    br.a = a;
    br.b = b;
    br.r = r;
    br.linv = l.inverse();
    br.offset = offset;
    offset += 3;
    branches_.push_back(br);
    return static_cast<int>(branches_.size() - 1);
  };
  for (const auto& l : net_.lines) {
    const double s = l.length_m / 1000.0;
    const int a = net_.node_index(l.from), b = net_.node_index(l.to);
    const Eigen::Matrix3d lm = s * sequence_matrix(l.l_zero_h_per_km, l.l_pos_h_per_km);
    if (std::abs(lm.determinant()) == 0.0)
      throw Error(ErrorKind::Assembly, "line " + l.from + "-" + l.to + " needs inductance for the time-domain model");
    line_branch_.push_back(add_branch(a, b, s * sequence_matrix(l.r_zero_ohm_per_km, l.r_pos_ohm_per_km), lm));
    const Eigen::Matrix3d c = 0.5 * s * sequence_matrix(l.c_zero_f_per_km, l.c_pos_f_per_km);
    nodes_[a].cap += c;
    nodes_[b].cap += c;
  }
  for (std::size_t s = 0; s < net_.sources.size(); ++s) {
    const auto& src = net_.sources[s];
    source_branch_.push_back(add_branch(n_net + static_cast<int>(s), net_.node_index(src.node),
                                        src.resistance() * Eigen::Matrix3d::Identity(),
                                        src.reactance() / w1_ * Eigen::Matrix3d::Identity()));
  }
  for (const auto& ld : net_.loads) {
    const auto [r, l] = load_rl(ld, net_.v_base_rms, f1_);
    const int n = net_.node_index(ld.node);
    load_node_.push_back(n);
    if ((l.array() > 0.0).all()) {
      load_branch_.push_back(add_branch(n, -1, r.asDiagonal(), l.asDiagonal()));
    } else {
      // Resistive (or partly unloaded) phases become shunt conductances.
      if ((l.array() > 0.0).any())
        throw Error(ErrorKind::Assembly, "load at " + ld.node + " mixes inductive and resistive phases");
      Eigen::Vector3d g = Eigen::Vector3d::Zero();
      for (int p = 0; p < 3; ++p) g(p) = r(p) > 0.0 ? 1.0 / r(p) : 0.0;
      nodes_[n].g += g.asDiagonal();
      load_branch_.push_back(-1);
    }
  }
  for (int n = 0; n < n_net; ++n) {
    Node& nd = nodes_[n];
    if (nd.cap.cwiseAbs().maxCoeff() > 0.0) {
      nd.kind = Node::Capacitive;
      nd.cinv = nd.cap.inverse();
      nd.offset = offset;
      offset += 3;
    } else {
      nd.kind = Node::Algebraic;
      if (nd.g.cwiseAbs().maxCoeff() > 0.0)
        throw Error(ErrorKind::Assembly, "node " + node_names_[n] + " has a resistive load but no capacitance");
      nd.offset = static_cast<int>(algebraic_.size());
      algebraic_.push_back(n);
    }
  }
  for (const auto& c : ciders) {
    const int n = net_.node_index(c.node);
    if (n < 0) throw Error(ErrorKind::Assembly, "converter " + c.name + " at unknown node " + c.node);
    ciders_.emplace_back(c, f1_);
    cider_node_.push_back(n);
    cider_offset_.push_back(offset);
    offset += TdsCiderModel::kStates;
  }
  n_states_ = offset;

  // KCL in derivative form at nodes without capacitance: M v_alg = -c(state).
  const int na = static_cast<int>(algebraic_.size());
  if (na > 0) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * na, 3 * na);
    for (const auto& br : branches_) {
      for (int end = 0; end < 2; ++end) {
        const int n = end == 0 ? br.a : br.b;
        if (n < 0 || nodes_[n].kind != Node::Algebraic) continue;
        const double sigma = end == 0 ? -1.0 : 1.0;
        const int row = 3 * nodes_[n].offset;
        if (br.a >= 0 && nodes_[br.a].kind == Node::Algebraic)
          m.block<3, 3>(row, 3 * nodes_[br.a].offset) += sigma * br.linv;
        if (br.b >= 0 && nodes_[br.b].kind == Node::Algebraic)
          m.block<3, 3>(row, 3 * nodes_[br.b].offset) -= sigma * br.linv;
      }
    }
    for (std::size_t k = 0; k < ciders_.size(); ++k) {
      const Node& nd = nodes_[cider_node_[k]];
      if (nd.kind != Node::Algebraic) continue;
      m.block<3, 3>(3 * nd.offset, 3 * nd.offset) -=
          Eigen::Matrix3d::Identity() / ciders_[k].spec().params.l_gamma;
    }
    alg_lu_.compute(m);
    if (!(alg_lu_.rcond() > 1e-14))
      throw Error(ErrorKind::Assembly, "a node without capacitance has no inductive path");
  }
}

void TimeDomainSimulator::node_voltages(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& v) const {
  v.setZero(3, static_cast<Eigen::Index>(nodes_.size()));
  const double theta = w1_ * t;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const Node& nd = nodes_[n];
    if (nd.kind == Node::Capacitive) {
      v.col(n) = x.segment<3>(nd.offset);
    } else if (nd.kind == Node::Source) {
      const auto& src = net_.sources[nd.source];
      const double peak = std::sqrt(2.0) * src.v_nominal_rms;
      for (const auto& [h, mp] : src.harmonics)
        for (int k = 0; k < 3; ++k)
          v(k, n) += peak * mp.first * std::cos(h * (theta - 2.0 * kPi * k / 3.0) + mp.second);
    }
  }
  if (algebraic_.empty()) return;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(algebraic_.size()));
  for (const auto& br : branches_) {
    for (int end = 0; end < 2; ++end) {
      const int n = end == 0 ? br.a : br.b;
      if (n < 0 || nodes_[n].kind != Node::Algebraic) continue;
      const double sigma = end == 0 ? -1.0 : 1.0;
      Eigen::Vector3d known = -br.r * x.segment<3>(br.offset);
      if (br.a >= 0 && nodes_[br.a].kind != Node::Algebraic) known += v.col(br.a);
      if (br.b >= 0 && nodes_[br.b].kind != Node::Algebraic) known -= v.col(br.b);
      c.segment<3>(3 * nodes_[n].offset) += sigma * br.linv * known;
    }
  }
  for (std::size_t k = 0; k < ciders_.size(); ++k) {
    const Node& nd = nodes_[cider_node_[k]];
    if (nd.kind != Node::Algebraic) continue;
    const CiderParams& p = ciders_[k].spec().params;
    const int o = cider_offset_[k];
    c.segment<3>(3 * nd.offset) += (x.segment<3>(o + 3) - p.r_gamma * x.segment<3>(o + 6)) / p.l_gamma;
  }
  const Eigen::VectorXd va = alg_lu_.solve(-c);
  for (std::size_t i = 0; i < algebraic_.size(); ++i) v.col(algebraic_[i]) = va.segment<3>(3 * i);
}

void TimeDomainSimulator::derivatives(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) const {
  dx.setZero(n_states_);
  Eigen::MatrixXd v;
  node_voltages(t, x, v);
  Eigen::MatrixXd inj = Eigen::MatrixXd::Zero(3, static_cast<Eigen::Index>(nodes_.size()));
  for (const auto& br : branches_) {
    const Eigen::Vector3d i = x.segment<3>(br.offset);
    Eigen::Vector3d drive = v.col(br.a) - br.r * i;
    if (br.b >= 0) {
      drive -= v.col(br.b);
      inj.col(br.b) += i;
    }
    inj.col(br.a) -= i;
    dx.segment<3>(br.offset) = br.linv * drive;
  }
  for (std::size_t k = 0; k < ciders_.size(); ++k) {
    const int o = cider_offset_[k];
    ciders_[k].derivatives(t, x.data() + o, v.col(cider_node_[k]), dx.data() + o);
    inj.col(cider_node_[k]) += x.segment<3>(o + 6);
  }
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const Node& nd = nodes_[n];
    if (nd.kind != Node::Capacitive) continue;
    dx.segment<3>(nd.offset) = nd.cinv * (inj.col(n) - nd.g * v.col(n));
  }
}

void TimeDomainSimulator::rk4_step(double t, double dt, Eigen::VectorXd& x) const {
  Eigen::VectorXd k1, k2, k3, k4;
  derivatives(t, x, k1);
  derivatives(t + 0.5 * dt, x + 0.5 * dt * k1, k2);
  derivatives(t + 0.5 * dt, x + 0.5 * dt * k2, k3);
  derivatives(t + dt, x + dt * k3, k4);
  x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd TimeDomainSimulator::initial_state() const {
  // Passive fundamental phasor solution with converters as constant
  // current injections at their setpoints.
  const HarmonicIndexSet fund(f1_, 1);
  const MatrixXcd y = assemble_admittance(net_, f1_, 1);
  const int n_net = static_cast<int>(net_.nodes.size());
  const int n_all = static_cast<int>(nodes_.size());
  VectorXcd inj = VectorXcd::Zero(3 * n_net);
  std::vector<Eigen::Vector3cd> i_cider;
  const double v_d = std::sqrt(3.0) * net_.v_base_rms;
  for (std::size_t k = 0; k < ciders_.size(); ++k) {
    const Setpoints& sp = ciders_[k].spec().setpoints;
    const Complex idq(sp.p_w / v_d, -sp.q_var / v_d);
    Eigen::Vector3cd i;
    for (int p = 0; p < 3; ++p) i(p) = 0.5 * kSqrt23 * std::polar(1.0, -2.0 * kPi * p / 3.0) * idq;
    i_cider.push_back(i);
    inj.segment<3>(3 * cider_node_[k]) += i;
  }
  VectorXcd ve(3 * (n_all - n_net));
  for (std::size_t s = 0; s < net_.sources.size(); ++s) {
    const HarmonicSignal e = net_.sources[s].emf(fund);
    for (int p = 0; p < 3; ++p) ve(3 * s + p) = e(p, 1);
  }
  const MatrixXcd ykk = y.topLeftCorner(3 * n_net, 3 * n_net);
  const MatrixXcd yke = y.topRightCorner(3 * n_net, ve.size());
  VectorXcd vall(3 * n_all);
  vall.head(3 * n_net) = ykk.partialPivLu().solve(inj - yke * ve);
  vall.tail(ve.size()) = ve;

  auto re = [](const Eigen::Vector3cd& z) { return Eigen::Vector3d(2.0 * z.real()); };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_states_);
  const Complex jw(0.0, w1_);
  for (const auto& br : branches_) {
    Eigen::Vector3cd dv = vall.segment<3>(3 * br.a);
    if (br.b >= 0) dv -= vall.segment<3>(3 * br.b);
    const Matrix3cd z = br.r.cast<Complex>() + jw * br.linv.inverse().cast<Complex>();
    x.segment<3>(br.offset) = re(z.partialPivLu().solve(dv));
  }
  for (int n = 0; n < n_net; ++n)
    if (nodes_[n].kind == Node::Capacitive) x.segment<3>(nodes_[n].offset) = re(vall.segment<3>(3 * n));
  for (std::size_t k = 0; k < ciders_.size(); ++k) {
    const CiderParams& p = ciders_[k].spec().params;
    const int o = cider_offset_[k];
    const Eigen::Vector3cd ig = i_cider[k];
    const Eigen::Vector3cd vf = vall.segment<3>(3 * cider_node_[k]) + (p.r_gamma + jw * p.l_gamma) * ig;
    const Eigen::Vector3cd ia = ig + (p.g_phi + jw * p.c_phi) * vf;
    x.segment<3>(o) = re(ia);
    x.segment<3>(o + 3) = re(vf);
    x.segment<3>(o + 6) = re(ig);
    x(o + 9) = ciders_[k].spec().setpoints.v_dc;
  }
  return x;
}

double TimeDomainSimulator::periodic_change_pu(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double vb = std::sqrt(2.0) * net_.v_base_rms, ib = std::sqrt(2.0) * net_.i_base_rms();
  double m = 0.0;
  for (const auto& br : branches_) m = std::max(m, (a.segment<3>(br.offset) - b.segment<3>(br.offset)).cwiseAbs().maxCoeff() / ib);
  for (const auto& nd : nodes_)
    if (nd.kind == Node::Capacitive)
      m = std::max(m, (a.segment<3>(nd.offset) - b.segment<3>(nd.offset)).cwiseAbs().maxCoeff() / vb);
  for (int o : cider_offset_) {
    for (int i = 0; i < 9; ++i) m = std::max(m, std::abs(a(o + i) - b(o + i)) / ((i >= 3 && i < 6) ? vb : ib));
    m = std::max(m, std::abs(a(o + 9) - b(o + 9)) / vb);
  }
  return m;
}

std::vector<std::string> TimeDomainSimulator::channel_names() const {
  std::vector<std::string> out;
  const char* ph = "abc";
  for (std::size_t n = 0; n < net_.nodes.size(); ++n)
    for (int p = 0; p < 3; ++p) out.push_back("v:" + net_.nodes[n] + ":" + ph[p]);
  for (const auto& s : net_.sources)
    for (int p = 0; p < 3; ++p) out.push_back("i:" + s.node + ":" + ph[p]);
  for (const auto& c : ciders_)
    for (int p = 0; p < 3; ++p) out.push_back("i:" + c.spec().name + ":" + ph[p]);
  for (const auto& l : net_.loads)
    for (int p = 0; p < 3; ++p) out.push_back("i:" + l.node + ":" + ph[p]);
  for (const auto& c : ciders_) out.push_back("vdc:" + c.spec().name);
  return out;
}

Eigen::VectorXd TimeDomainSimulator::channel_values(double t, const Eigen::VectorXd& x) const {
  Eigen::MatrixXd v;
  node_voltages(t, x, v);
  const int n_net = static_cast<int>(net_.nodes.size());
  Eigen::VectorXd out(3 * (n_net + net_.sources.size() + ciders_.size() + net_.loads.size()) + ciders_.size());
  Eigen::Index i = 0;
  for (int n = 0; n < n_net; ++n, i += 3) out.segment<3>(i) = v.col(n);
  for (int b : source_branch_) out.segment<3>(i) = x.segment<3>(branches_[b].offset), i += 3;
  for (int o : cider_offset_) out.segment<3>(i) = x.segment<3>(o + 6), i += 3;
  for (std::size_t l = 0; l < net_.loads.size(); ++l, i += 3) {
    const int b = load_branch_[l];
    out.segment<3>(i) = b >= 0 ? Eigen::Vector3d(x.segment<3>(branches_[b].offset))
                               : Eigen::Vector3d(nodes_[load_node_[l]].g * v.col(load_node_[l]));
  }
  for (std::size_t k = 0; k < ciders_.size(); ++k)
    out(i++) = ciders_[k].spec().dc_side ? x(cider_offset_[k] + 9) : ciders_[k].spec().setpoints.v_dc;
  return out;
}

TdsResult TimeDomainSimulator::run(const TdsOptions& o, const HarmonicIndexSet& set) const {
  const auto t0 = std::chrono::steady_clock::now();
  const int block = 2 * set.size();
  if (o.samples_per_period <= 0 || o.samples_per_period % block != 0)
    throw Error(ErrorKind::Windowing, "samples per period must be a multiple of " + std::to_string(block));
  if (o.record_samples_per_period <= 0 || o.record_samples_per_period % block != 0 ||
      o.samples_per_period % o.record_samples_per_period != 0)
    throw Error(ErrorKind::Windowing, "recording rate must divide the step rate and be a multiple of " +
                                          std::to_string(block));
  if (set.f1() != f1_) throw Error(ErrorKind::Structural, "index set and simulator use different f1");
  const int spp = o.samples_per_period;
  const double dt = 1.0 / (f1_ * spp);
  const int max_periods = std::max(o.min_periods, static_cast<int>(std::ceil(o.max_duration_s * f1_)));

  TdsResult res;
  Eigen::VectorXd x = initial_state();
  Eigen::VectorXd prev = x;
  long period = 0;
  auto check = [&](const Eigen::VectorXd& s, double t) {
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (!std::isfinite(s(i)) || std::abs(s(i)) > o.guard)
        throw Error(ErrorKind::Instability, "state " + std::to_string(i) + " diverged at t = " + std::to_string(t) + " s");
  };
  for (; period < max_periods; ++period) {
    for (int s = 0; s < spp; ++s) rk4_step((period * spp + s) * dt, dt, x);
    check(x, (period + 1) / f1_);
    res.final_period_change_pu = periodic_change_pu(x, prev);
    prev = x;
    if (period + 1 >= o.min_periods && res.final_period_change_pu < o.settle_tolerance_pu) {
      res.settled = true;
      ++period;
      break;
    }
  }

  const int dec = spp / o.record_samples_per_period;
  const int n_rec = o.dft_periods * o.record_samples_per_period;
  Waveforms& w = res.waveforms;
  w.f1 = f1_;
  w.samples_per_period = o.record_samples_per_period;
  w.channels = channel_names();
  w.values.resize(n_rec, static_cast<Eigen::Index>(w.channels.size()));
  w.time.resize(n_rec);
  for (int p = 0; p < o.dft_periods; ++p, ++period) {
    for (int s = 0; s < spp; ++s) {
      const double t = (period * spp + s) * dt;
      if (s % dec == 0) {
        const int r = p * o.record_samples_per_period + s / dec;
        w.time[r] = t;
        w.values.row(r) = channel_values(t, x).transpose();
      }
      rk4_step(t, dt, x);
    }
  }
  check(x, period / f1_);
  res.simulated_s = period / f1_;

  std::vector<int> idx;
  int c = 0;
  auto take = [&](int n) {
    idx.clear();
    for (int k = 0; k < n; ++k) idx.push_back(c++);
    return dft_extract(w, idx, set, o.dft_periods);
  };
  for (const auto& n : net_.nodes) res.node_voltages[n] = take(3);
  for (const auto& s : net_.sources) res.node_currents[s.node] = take(3);
  for (const auto& k : ciders_) res.node_currents[k.spec().name] = take(3);
  for (const auto& l : net_.loads) res.node_currents[l.node] = take(3);
  for (const auto& k : ciders_) res.dc_voltages[k.spec().name] = take(1);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

HarmonicSignal dft_extract(const Waveforms& w, const std::vector<int>& channels, const HarmonicIndexSet& set,
                           int periods) {
  const int spp = w.samples_per_period;
  if (spp <= 0 || spp % (2 * set.size()) != 0)
    throw Error(ErrorKind::Windowing, "samples per period must be a multiple of 2*(2*h_max+1)");
  const long n = static_cast<long>(periods) * spp;
  if (periods < 1 || w.values.rows() < n) throw Error(ErrorKind::Windowing, "record shorter than the DFT window");
  const long first = w.values.rows() - n;
  if (!w.time.empty()) {
    const double cycles = w.time[first] * w.f1;
    if (std::abs(cycles - std::round(cycles)) > 1e-6)
      throw Error(ErrorKind::Windowing, "DFT window does not start on a period boundary");
  }
  HarmonicSignal out(set, static_cast<int>(channels.size()));
  for (int h = 0; h <= set.h_max(); ++h) {
    VectorXcd tw(spp);
    for (int s = 0; s < spp; ++s) tw(s) = std::polar(1.0, -2.0 * kPi * h * s / spp);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      Complex acc = 0.0;
      for (long s = 0; s < n; ++s) acc += w.values(first + s, channels[c]) * tw(s % spp);
      out(static_cast<int>(c), h) = acc / static_cast<double>(n);
      if (h > 0) out(static_cast<int>(c), -h) = std::conj(out(static_cast<int>(c), h));
    }
  }
  return out;
}

namespace {
double pu(Complex x, int h, double base) { return (h == 0 ? 1.0 : std::sqrt(2.0)) * std::abs(x) / base; }
}  // namespace

std::vector<KpiEntry> compare_spectra(const HarmonicSignal& a, const HarmonicSignal& b, double base,
                                      double arg_floor_pu) {
  if (a.channels() != b.channels()) throw Error(ErrorKind::Structural, "spectra have different channel counts");
  const int hm = std::min(a.index_set().h_max(), b.index_set().h_max());
  std::vector<KpiEntry> out;
  for (int h = 0; h <= hm; ++h) {
    KpiEntry e;
    e.h = h;
    bool any_arg = false;
    for (int c = 0; c < a.channels(); ++c) {
      const Complex x = a(c, h), y = b(c, h);
      e.e_abs = std::max(e.e_abs, std::abs(pu(x, h, base) - pu(y, h, base)));
      if (pu(x, h, base) >= arg_floor_pu && pu(y, h, base) >= arg_floor_pu) {
        const double d = std::abs(std::arg(x / y));  // wrapped into [0, pi]
        e.e_arg = any_arg ? std::max(e.e_arg, d) : d;
        any_arg = true;
      }
    }
    if (!any_arg) e.e_arg = std::numeric_limits<double>::quiet_NaN();
    out.push_back(e);
  }
  return out;
}

double max_abs_error(const std::vector<KpiEntry>& k) {
  double m = 0.0;
  for (const auto& e : k) m = std::max(m, e.e_abs);
  return m;
}

double max_arg_error(const std::vector<KpiEntry>& k) {
  double m = 0.0;
  for (const auto& e : k)
    if (!std::isnan(e.e_arg)) m = std::max(m, e.e_arg);
  return m;
}

std::vector<double> thd_percent(const HarmonicSignal& s) {
  std::vector<double> out;
  const auto& set = s.index_set();
  for (int c = 0; c < s.channels(); ++c) {
    const double f = std::abs(s(c, 1));
    double sum = 0.0;
    for (int h = 2; h <= set.h_max(); ++h) sum += std::norm(s(c, h));
    out.push_back(f > 1e-12 ? 100.0 * std::sqrt(sum) / f : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

double max_thd_percent(const HarmonicSignal& s) {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (double v : thd_percent(s))
    if (!std::isnan(v)) m = std::isnan(m) ? v : std::max(m, v);
  return m;
}

}  // namespace hpf
