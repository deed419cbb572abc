#include "hpf/cider.hpp"

#include <cmath>

#include "hpf/error.hpp"

namespace hpf {

void CiderParams::validate() const {
  for (double v : {l_alpha, c_phi, l_gamma, c_delta})
    if (!(v > 0.0)) throw Error(ErrorKind::Model, "filter inductances and capacitances must be positive");
  for (const StageGains* g : {&alpha, &phi, &gamma, &delta})
    if (!(g->t_fb > 0.0)) throw Error(ErrorKind::Model, "integrator time constants must be positive");
}

LtpModel::LtpModel(int nx_, int nu_, int ny_, int nw_)
    : nx(nx_), nu(nu_), ny(ny_), nw(nw_),
      a(nx_, nx_), b(nx_, nu_), c(ny_, nx_), d(ny_, nu_), e(nx_, nw_), f(ny_, nw_) {}

namespace {

// Adds the time-varying scalar coefficient s(t) (given by its spectrum) at
// entry (row, col) of a Fourier matrix, scaled by k.
void add_signal(FourierMatrix& m, int row, int col, const HarmonicSignal& s, int channel, double k) {
  const auto& set = s.index_set();
  for (int h = -set.h_max(); h <= set.h_max(); ++h) {
    const Complex v = s(channel, h);
    if (v != Complex(0.0)) m.at(h)(row, col) += k * v;
  }
}

void check_op(const OperatingPoint& op) {
  if (op.v_ref_abc.channels() != 3 || op.i_alpha.channels() != 3 || op.v_dc.channels() != 1)
    throw Error(ErrorKind::Structural, "operating point needs 3-phase v*_alpha, i_alpha and a 1-channel v_delta");
  if (!(op.v_ref_abc.index_set() == op.i_alpha.index_set()) || !(op.v_dc.index_set() == op.i_alpha.index_set()))
    throw Error(ErrorKind::Structural, "operating point spectra use different index sets");
}

}  // namespace

LtpModel build_power_hardware(const CiderParams& p, const Setpoints& sp, const OperatingPoint* op) {
  p.validate();
  if (!(sp.v_dc > 0.0)) throw Error(ErrorKind::Model, "DC voltage setpoint must be positive");
  LtpModel m(10, 3, 14, 7);
  MatrixXcd& a = m.a.invariant.at(0);
  MatrixXcd& e = m.e.invariant.at(0);
  for (int k = 0; k < 3; ++k) {
    const int ia = k, vf = 3 + k, ig = 6 + k;
    a(ia, ia) = -p.r_alpha / p.l_alpha;
    a(ia, vf) = -1.0 / p.l_alpha;
    a(vf, ia) = 1.0 / p.c_phi;
    a(vf, ig) = -1.0 / p.c_phi;
    a(vf, vf) = -p.g_phi / p.c_phi;
    a(ig, vf) = 1.0 / p.l_gamma;
    a(ig, ig) = -p.r_gamma / p.l_gamma;
    e(ig, k) = -1.0 / p.l_gamma;
  }
  const double V = sp.v_dc;
  a(9, 9) = -p.g_delta / p.c_delta - sp.p_w / (p.c_delta * V * V);
  e(9, 3) = 2.0 / p.c_delta;

  MatrixXcd& c = m.c.invariant.at(0);
  MatrixXcd& f = m.f.invariant.at(0);
  for (int i = 0; i < 10; ++i) c(i, i) = 1.0;
  for (int k = 0; k < 3; ++k) f(10 + k, k) = 1.0;
  c(13, 9) = -sp.p_w / (V * V);
  f(13, 3) = 2.0;

  if (op) {
    check_op(*op);
    for (int k = 0; k < 3; ++k) {
      add_signal(m.a.dependent, k, 9, op->v_ref_abc, k, 1.0 / (p.l_alpha * V));
      add_signal(m.a.dependent, 9, k, op->v_ref_abc, k, -1.0 / (p.c_delta * V));
      add_signal(m.b.dependent, k, k, op->v_dc, 0, 1.0 / (p.l_alpha * V));
      add_signal(m.b.dependent, 9, k, op->i_alpha, k, -1.0 / (p.c_delta * V));
      add_signal(m.e.dependent, k, 4 + k, op->v_dc, 0, -1.0 / (p.l_alpha * V));
      add_signal(m.e.dependent, 9, 4 + k, op->i_alpha, k, 1.0 / (p.c_delta * V));
    }
  }
  return m;
}

LtpModel build_power_hardware_ac_only(const CiderParams& p) {
  p.validate();
  LtpModel m(9, 3, 12, 3);
  MatrixXcd& a = m.a.invariant.at(0);
  MatrixXcd& b = m.b.invariant.at(0);
  MatrixXcd& e = m.e.invariant.at(0);
  MatrixXcd& c = m.c.invariant.at(0);
  MatrixXcd& f = m.f.invariant.at(0);
  for (int k = 0; k < 3; ++k) {
    const int ia = k, vf = 3 + k, ig = 6 + k;
    a(ia, ia) = -p.r_alpha / p.l_alpha;
    a(ia, vf) = -1.0 / p.l_alpha;
    b(ia, k) = 1.0 / p.l_alpha;
    a(vf, ia) = 1.0 / p.c_phi;
    a(vf, ig) = -1.0 / p.c_phi;
    a(vf, vf) = -p.g_phi / p.c_phi;
    a(ig, vf) = 1.0 / p.l_gamma;
    a(ig, ig) = -p.r_gamma / p.l_gamma;
    e(ig, k) = -1.0 / p.l_gamma;
    f(9 + k, k) = 1.0;
  }
  for (int i = 0; i < 9; ++i) c(i, i) = 1.0;
  return m;
}

namespace {

// Affine expression over (x, u, w) of a controller; the cascade below is
// written as plain arithmetic on these and then read off as matrices.
struct Expr {
  Eigen::RowVectorXd x, u, w;
  Expr(int nx, int nu, int nw) : x(Eigen::RowVectorXd::Zero(nx)), u(Eigen::RowVectorXd::Zero(nu)), w(Eigen::RowVectorXd::Zero(nw)) {}
  Expr operator+(const Expr& o) const {
    Expr r = *this;
    r.x += o.x;
    r.u += o.u;
    r.w += o.w;
    return r;
  }
  Expr operator-(const Expr& o) const { return *this + o * -1.0; }
  Expr operator*(double k) const {
    Expr r = *this;
    r.x *= k;
    r.u *= k;
    r.w *= k;
    return r;
  }
};
Expr operator*(double k, const Expr& e) { return e * k; }

struct Builder {
  int nx, nu, nw;
  Expr zero() const { return Expr(nx, nu, nw); }
  Expr x(int i) const { Expr e = zero(); e.x(i) = 1.0; return e; }
  Expr u(int i) const { Expr e = zero(); e.u(i) = 1.0; return e; }
  Expr w(int i) const { Expr e = zero(); e.w(i) = 1.0; return e; }
};

void set_state_row(LtpModel& m, int row, const Expr& e) {
  m.a.invariant.at(0).row(row) = e.x.cast<Complex>();
  m.b.invariant.at(0).row(row) = e.u.cast<Complex>();
  m.e.invariant.at(0).row(row) = e.w.cast<Complex>();
}

void set_output_row(LtpModel& m, int row, const Expr& e) {
  m.c.invariant.at(0).row(row) = e.x.cast<Complex>();
  m.d.invariant.at(0).row(row) = e.u.cast<Complex>();
  m.f.invariant.at(0).row(row) = e.w.cast<Complex>();
}

// PI stage: k_ffb*ref - k_fb*meas + (k_fb/t_fb)*integral + k_ft*ft.
Expr stage(const StageGains& g, double k_ff, const Expr& ref, const Expr& meas, const Expr& integral, const Expr& ft) {
  return (k_ff + g.k_fb) * ref - g.k_fb * meas + (g.k_fb / g.t_fb) * integral + g.k_ft * ft;
}

// Shared inner cascade: gamma -> phi -> alpha for one axis.  Index maps give
// the positions of x/u channels; integrals are x1 (alpha), x2 (phi), x3 (gamma).
void inner_cascade(LtpModel& m, const Builder& B, const CiderParams& p, int axis, const Expr& i_gamma_ref, int x1,
                   int x2, int x3, int u_ia, int u_vf, int u_ig, int u_vg) {
  const Expr v_phi_ref = stage(p.gamma, p.k_ff_gamma(), i_gamma_ref, B.u(u_ig + axis), B.x(x3 + axis), B.u(u_vg + axis));
  const Expr i_alpha_ref = stage(p.phi, p.k_ff_phi(), v_phi_ref, B.u(u_vf + axis), B.x(x2 + axis), B.u(u_ig + axis));
  const Expr v_alpha_ref = stage(p.alpha, p.k_ff_alpha(), i_alpha_ref, B.u(u_ia + axis), B.x(x1 + axis), B.u(u_vf + axis));
  set_state_row(m, x1 + axis, i_alpha_ref - B.u(u_ia + axis));
  set_state_row(m, x2 + axis, v_phi_ref - B.u(u_vf + axis));
  set_state_row(m, x3 + axis, i_gamma_ref - B.u(u_ig + axis));
  set_output_row(m, axis, v_alpha_ref);
}

}  // namespace

LtpModel build_control_software(const CiderParams& p) {
  p.validate();
  LtpModel m(7, 10, 2, 2);
  const Builder B{7, 10, 2};
  // u: 0-1 i_alpha, 2-3 v_phi, 4-5 i_gamma, 6 v_delta, 7-8 v_gamma, 9 i_eps; w: 0 i*_Q, 1 V*
  const Expr dc_error = B.w(1) - B.u(6);
  const Expr i_d_ref = p.k_fb_delta_signed() * (dc_error + B.x(6) * (1.0 / p.delta.t_fb)) + p.delta.k_ft * B.u(9) +
                       p.k_ff_delta() * B.w(1);
  set_state_row(m, 6, dc_error);
  inner_cascade(m, B, p, 0, i_d_ref, 0, 2, 4, 0, 2, 4, 7);
  inner_cascade(m, B, p, 1, B.w(0), 0, 2, 4, 0, 2, 4, 7);
  return m;
}

LtpModel build_control_software_ac_only(const CiderParams& p) {
  p.validate();
  LtpModel m(6, 8, 2, 2);
  const Builder B{6, 8, 2};
  // u: 0-1 i_alpha, 2-3 v_phi, 4-5 i_gamma, 6-7 v_gamma; w: 0 i*_D, 1 i*_Q
  inner_cascade(m, B, p, 0, B.w(0), 0, 2, 4, 0, 2, 4, 6);
  inner_cascade(m, B, p, 1, B.w(1), 0, 2, 4, 0, 2, 4, 6);
  return m;
}

namespace {

FourierMatrix block_diag(const FourierMatrix& a, const FourierMatrix& b) {
  FourierMatrix out(a.rows + b.rows, a.cols + b.cols);
  for (const auto& [h, m] : a.coeffs) out.at(h).topLeftCorner(a.rows, a.cols) = m;
  for (const auto& [h, m] : b.coeffs) out.at(h).bottomRightCorner(b.rows, b.cols) = m;
  return out;
}

SparseMatrixC sparse_identity(Eigen::Index n) {
  SparseMatrixC i(n, n);
  i.setIdentity();
  return i;
}

}  // namespace

SparseMatrixC channel_selector(const HarmonicIndexSet& set, int total, int first, int count) {
  if (first < 0 || count < 0 || first + count > total) throw Error(ErrorKind::Structural, "channel selection out of range");
  std::vector<Eigen::Triplet<Complex>> t;
  for (int pos = 0; pos < set.size(); ++pos)
    for (int c = 0; c < count; ++c) t.emplace_back(pos * count + c, pos * total + first + c, 1.0);
  SparseMatrixC s(set.size() * count, set.size() * total);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

GridResponse::GridResponse(const LtpModel& pi, const LtpModel& kappa, const FourierMatrix& feedback,
                           const HarmonicIndexSet& set)
    : set_(set), nx_(pi.nx + kappa.nx), ny_(pi.ny + kappa.ny), nw_(pi.nw + kappa.nw) {
  if (feedback.rows != pi.nu + kappa.nu || feedback.cols != ny_)
    throw Error(ErrorKind::Structural, "feedback matrix must map outputs onto inputs");
  const SparseMatrixC A = lift(block_diag(pi.a.total(), kappa.a.total()), set);
  const SparseMatrixC B = lift(block_diag(pi.b.total(), kappa.b.total()), set);
  const SparseMatrixC C = lift(block_diag(pi.c.total(), kappa.c.total()), set);
  const SparseMatrixC D = lift(block_diag(pi.d.total(), kappa.d.total()), set);
  const SparseMatrixC E = lift(block_diag(pi.e.total(), kappa.e.total()), set);
  const SparseMatrixC F = lift(block_diag(pi.f.total(), kappa.f.total()), set);
  const SparseMatrixC T = lift(feedback, set);

  // Output loop (I - D T)^-1.  Nilpotent in the cascade structure, otherwise dense.
  const SparseMatrixC DT = D * T;
  SparseMatrixC L;
  if (SparseMatrixC(DT * DT).norm() == 0.0) {
    L = sparse_identity(DT.rows()) + DT;
  } else {
    const MatrixXcd loop = MatrixXcd::Identity(DT.rows(), DT.cols()) - MatrixXcd(DT);
    Eigen::PartialPivLU<MatrixXcd> lu(loop);
    if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::Model, "algebraic feedback loop is singular");
    L = lu.inverse().sparseView();
  }
  const SparseMatrixC BTL = B * (T * L);
  const SparseMatrixC A_cl = A + BTL * C;
  e_cl_ = E + BTL * F;
  c_cl_ = L * C;
  f_cl_ = L * F;

  SparseMatrixC sys = lifted_derivative(set, nx_) - A_cl;
  sys.makeCompressed();
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrixC>>();
  lu->analyzePattern(sys);
  lu->factorize(sys);
  if (lu->info() != Eigen::Success) throw Error(ErrorKind::Model, "closed-loop system is singular");
  // crude condition estimate from one solve with a fixed right-hand side
  const VectorXcd probe = VectorXcd::Ones(sys.rows());
  const VectorXcd x = lu->solve(probe);
  double norm1 = 0.0;
  for (Eigen::Index k = 0; k < sys.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrixC::InnerIterator it(sys, k); it; ++it) col += std::abs(it.value());
    norm1 = std::max(norm1, col);
  }
  const double growth = x.cwiseAbs().maxCoeff() * norm1;
  if (!x.allFinite() || !(growth < 1e13))
    throw Error(ErrorKind::Model, "closed-loop system is singular (condition estimate " + std::to_string(growth) + ")");
  lu_ = std::move(lu);
}

HarmonicSignal GridResponse::states(const HarmonicSignal& w) const {
  if (w.channels() != nw_ || !(w.index_set() == set_)) throw Error(ErrorKind::Structural, "disturbance layout mismatch");
  return HarmonicSignal(set_, nx_, lu_->solve(VectorXcd(e_cl_ * w.stacked())));
}

HarmonicSignal GridResponse::respond(const HarmonicSignal& w) const {
  const HarmonicSignal x = states(w);
  return HarmonicSignal(set_, ny_, c_cl_ * x.stacked() + f_cl_ * w.stacked());
}

MatrixXcd GridResponse::gain(int out_first, int out_count, int in_first, int in_count) const {
  const SparseMatrixC s_in = channel_selector(set_, nw_, in_first, in_count);
  const SparseMatrixC s_out = channel_selector(set_, ny_, out_first, out_count);
  const SparseMatrixC s_in_t = s_in.transpose();
  const MatrixXcd x = lu_->solve(MatrixXcd(e_cl_ * s_in_t));
  const SparseMatrixC c_sel = s_out * c_cl_;
  return c_sel * x + MatrixXcd(s_out * f_cl_ * s_in_t);
}

ReciprocalResult taylor_reciprocal(const HarmonicSignal& v, double min_abs) {
  if (v.channels() != 1) throw Error(ErrorKind::Structural, "reciprocal needs a one-channel signal");
  const auto& set = v.index_set();
  const Complex v0 = v(0, 0);
  if (!(std::abs(v0) >= min_abs))
    throw Error(ErrorKind::Degenerate, "expansion point |v0| = " + std::to_string(std::abs(v0)) + " below threshold");
  HarmonicSignal e = v;
  e(0, 0) = 0.0;
  const HarmonicSignal c = multiply(e, e);
  const Complex v2 = v0 * v0, v3 = v2 * v0, v4 = v3 * v0;

  ReciprocalResult r{HarmonicSignal(set, 1), MatrixXcd::Zero(set.size(), set.size())};
  r.value.stacked() = -e.stacked() / v2 + c.stacked() / v3;
  r.value(0, 0) += 1.0 / v0;

  const int H = set.h_max();
  for (int m = -H; m <= H; ++m) {
    r.jacobian(set.position(m), set.position(m)) -= 1.0 / v2;
    for (int j = -H; j <= H; ++j)
      if (set.contains(m - j)) r.jacobian(set.position(m), set.position(j)) += 2.0 * e(0, m - j) / v3;
  }
  // e excludes the h = 0 entry, so that column also carries d(c/v0^3)/dv0.
  r.jacobian.col(set.position(0)) -= 3.0 * c.stacked() / v4;
  return r;
}

ReciprocalResult reference_q_current(const HarmonicSignal& v_gamma_abc, double q_var, double v_base_rms) {
  if (v_gamma_abc.channels() != 3) throw Error(ErrorKind::Structural, "grid voltage must be three-phase");
  const auto& set = v_gamma_abc.index_set();
  const HarmonicOperator park = park_operator(set, ParkDirection::AbcToDq);
  const SparseMatrixC pick_d = channel_selector(set, 2, 0, 1);
  const MatrixXcd to_d = pick_d * park.matrix();
  const HarmonicSignal v_d(set, 1, to_d * v_gamma_abc.stacked());
  ReciprocalResult r = taylor_reciprocal(v_d, 0.1 * std::sqrt(3.0) * v_base_rms);
  r.value.stacked() *= q_var;
  r.jacobian = q_var * r.jacobian * to_d;
  return r;
}

HarmonicSignal thevenin_response(const HarmonicSignal& i_s, const TheveninSpec& te) {
  if (i_s.channels() != 3) throw Error(ErrorKind::Structural, "Thevenin current must be three-phase");
  const auto& set = i_s.index_set();
  HarmonicSignal v = te.emf(set);
  for (int h = -set.h_max(); h <= set.h_max(); ++h)
    for (int k = 0; k < 3; ++k) v(k, h) -= te.impedance(h) * i_s(k, h);
  return v;
}

GridFollowingCider::GridFollowingCider(std::string name, std::string node, const CiderParams& params,
                                       const Setpoints& sp, bool dc_side, const HarmonicIndexSet& set,
                                       double v_base_rms)
    : name_(std::move(name)), node_(std::move(node)), params_(params), sp_(sp), dc_side_(dc_side), set_(set),
      v_base_(v_base_rms) {
  params_.validate();
  op_ = flat_start();
  rebuild();
}

OperatingPoint GridFollowingCider::flat_start() const {
  const double v_d = std::sqrt(3.0) * v_base_;
  HarmonicSignal i_dq(set_, 2);
  i_dq(0, 0) = sp_.p_w / v_d;
  i_dq(1, 0) = sp_.q_var / v_d;
  OperatingPoint op;
  op.i_alpha = apply(park_operator(set_, ParkDirection::DqToAbc), i_dq);
  op.v_ref_abc = balanced_set(set_, 1, std::sqrt(2.0) * v_base_, 0.0);
  op.v_dc = HarmonicSignal(set_, 1);
  op.v_dc(0, 0) = sp_.v_dc;
  return op;
}

void GridFollowingCider::set_operating_point(const OperatingPoint& op) {
  check_op(op);
  if (!(op.i_alpha.index_set() == set_)) throw Error(ErrorKind::Structural, "operating point on a different index set");
  op_ = op;
  if (dc_side_) rebuild();
}

void GridFollowingCider::rebuild() {
  const FourierMatrix to_dq = park_coefficients(ParkDirection::AbcToDq);
  const FourierMatrix to_abc = park_coefficients(ParkDirection::DqToAbc);
  if (dc_side_) {
    const LtpModel pi = build_power_hardware(params_, sp_, &op_);
    const LtpModel kappa = build_control_software(params_);
    // u = (v*_alpha abc | i_alpha dq, v_phi dq, i_gamma dq, v_delta, v_gamma dq, i_eps)
    // y = (i_alpha, v_phi, i_gamma, v_delta, v_gamma, i_eps | v*_alpha dq)
    FourierMatrix t(13, 16);
    for (const auto& [h, m] : to_abc.coeffs) t.at(h).block(0, 14, 3, 2) = m;
    for (const auto& [h, m] : to_dq.coeffs) {
      t.at(h).block(3, 0, 2, 3) = m;
      t.at(h).block(5, 3, 2, 3) = m;
      t.at(h).block(7, 6, 2, 3) = m;
      t.at(h).block(10, 10, 2, 3) = m;
    }
    t.at(0)(9, 9) = 1.0;
    t.at(0)(12, 13) = 1.0;
    response_.emplace(pi, kappa, t, set_);
  } else {
    const LtpModel pi = build_power_hardware_ac_only(params_);
    const LtpModel kappa = build_control_software_ac_only(params_);
    // u = (v*_alpha abc | i_alpha dq, v_phi dq, i_gamma dq, v_gamma dq); y = (x, v_gamma | v*_alpha dq)
    FourierMatrix t(11, 14);
    for (const auto& [h, m] : to_abc.coeffs) t.at(h).block(0, 12, 3, 2) = m;
    for (const auto& [h, m] : to_dq.coeffs) {
      t.at(h).block(3, 0, 2, 3) = m;
      t.at(h).block(5, 3, 2, 3) = m;
      t.at(h).block(7, 6, 2, 3) = m;
      t.at(h).block(9, 9, 2, 3) = m;
    }
    response_.emplace(pi, kappa, t, set_);
  }
}

HarmonicSignal GridFollowingCider::disturbance(const HarmonicSignal& v_grid) const {
  if (v_grid.channels() != 3 || !(v_grid.index_set() == set_))
    throw Error(ErrorKind::Structural, "grid voltage layout mismatch");
  HarmonicSignal w(set_, response_->nw());
  w.assign(0, v_grid);
  if (dc_side_) {
    w(3, 0) = sp_.p_w / sp_.v_dc;
    w.assign(4, op_.v_ref_abc);
    w.assign(7, reference_q_current(v_grid, sp_.q_var, v_base_).value);
    w(8, 0) = sp_.v_dc;
  } else {
    const ReciprocalResult unit = reference_q_current(v_grid, 1.0, v_base_);
    HarmonicSignal id = unit.value, iq = unit.value;
    id.stacked() *= sp_.p_w;
    iq.stacked() *= sp_.q_var;
    w.assign(3, id);
    w.assign(4, iq);
  }
  return w;
}

HarmonicSignal GridFollowingCider::outputs(const HarmonicSignal& v_grid) const {
  return response_->respond(disturbance(v_grid));
}

GridFollowingCider::Injection GridFollowingCider::grid_current(const HarmonicSignal& v_grid, bool with_jacobian) const {
  Injection out{grid_current_of(outputs(v_grid)), MatrixXcd()};
  if (!with_jacobian) return out;
  out.jacobian = response_->gain(6, 3, 0, 3);
  const ReciprocalResult unit = reference_q_current(v_grid, 1.0, v_base_);
  if (dc_side_) {
    out.jacobian += response_->gain(6, 3, 7, 1) * (sp_.q_var * unit.jacobian);
  } else {
    out.jacobian += response_->gain(6, 3, 3, 1) * (sp_.p_w * unit.jacobian);
    out.jacobian += response_->gain(6, 3, 4, 1) * (sp_.q_var * unit.jacobian);
  }
  return out;
}

HarmonicSignal GridFollowingCider::grid_current_of(const HarmonicSignal& y) const { return y.slice(6, 3); }

HarmonicSignal GridFollowingCider::dc_voltage(const HarmonicSignal& y) const {
  if (dc_side_) return y.slice(9, 1);
  HarmonicSignal v(set_, 1);
  v(0, 0) = sp_.v_dc;
  return v;
}

OperatingPoint GridFollowingCider::extract_operating_point(const HarmonicSignal& y) const {
  OperatingPoint op;
  op.v_ref_abc = apply(park_operator(set_, ParkDirection::DqToAbc), y.slice(y_kappa_first(), 2));
  op.i_alpha = y.slice(0, 3);
  op.v_dc = dc_voltage(y);
  op.v_ref_abc.make_real();
  op.i_alpha.make_real();
  op.v_dc.make_real();
  return op;
}

}  // namespace hpf
