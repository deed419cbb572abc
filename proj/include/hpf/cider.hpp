#pragma once

// Resource models.  A grid-following converter is described by two linear
// time-periodic blocks: the power hardware (filters, actuator, DC link) and
// the control software (cascaded PI loops in the DQ frame).  Both are
// six-matrix state-space models whose coefficients are Fourier series; the
// closed loop is solved directly in the harmonic domain.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hpf/harmonic.hpp"
#include "hpf/network.hpp"

namespace hpf {

// Cascaded PI stage: y = K_FFB*ref - K_FB*meas + (K_FB/T_FB)*integral + K_FT*feedthrough.
struct StageGains {
  double k_fb = 0.0;
  double t_fb = 1.0;
  double k_ft = 0.0;
  std::optional<double> k_ff;  // defaults to the stage's R or G
};

struct CiderParams {
  double l_alpha = 325e-6, r_alpha = 1.02e-3;
  double c_phi = 90.3e-6, g_phi = 0.0;
  double l_gamma = 325e-6, r_gamma = 1.02e-3;
  double c_delta = 310e-6, g_delta = 0.0;
  StageGains alpha{9.56, 1.47e-4, 1.0, {}};
  StageGains phi{0.569, 8.97e-4, 0.0, {}};
  StageGains gamma{0.23, 1e-3, 1.0, {}};
  StageGains delta{10.0, 3e-3, 1.0, {}};
  double rated_va = 60e3;

  double k_ff_alpha() const { return alpha.k_ff.value_or(r_alpha); }
  double k_ff_phi() const { return phi.k_ff.value_or(g_phi); }
  double k_ff_gamma() const { return gamma.k_ff.value_or(r_gamma); }
  double k_ff_delta() const { return delta.k_ff.value_or(g_delta); }
  // The DC-voltage loop acts on (v_delta - V*): with the current injected into
  // the grid a larger DC voltage must raise the D-axis current reference.
  double k_fb_delta_signed() const { return -delta.k_fb; }
  void validate() const;
};

struct Setpoints {
  double p_w = 50e3;
  double q_var = 16.4e3;
  double v_dc = 900.0;
};

struct OperatingPoint {
  HarmonicSignal v_ref_abc;  // actuator voltage reference
  HarmonicSignal i_alpha;    // actuator current
  HarmonicSignal v_dc;       // DC-link voltage (1 channel)
};

// Fourier-coefficient matrix split into the operating-point invariant part
// and the part that depends on the linearisation point.
struct SplitMatrix {
  FourierMatrix invariant;
  FourierMatrix dependent;

  SplitMatrix() = default;
  SplitMatrix(int rows, int cols) : invariant(rows, cols), dependent(rows, cols) {}
  FourierMatrix total() const { return invariant + dependent; }
};

struct LtpModel {
  int nx = 0, nu = 0, ny = 0, nw = 0;
  SplitMatrix a, b, c, d, e, f;

  LtpModel() = default;
  LtpModel(int nx_, int nu_, int ny_, int nw_);
};

// Hardware with DC side.  x = (i_alpha abc, v_phi abc, i_gamma abc, v_delta),
// u = v*_alpha abc, w = (v_gamma abc, P*/V*, vbar*_alpha abc),
// y = (x, v_gamma abc, i_eps).  A missing operating point gives the
// invariant model only.
LtpModel build_power_hardware(const CiderParams& params, const Setpoints& sp, const OperatingPoint* op);
// Control with DC loop.  x = integrals of (di_alpha dq, dv_phi dq, di_gamma dq, dv_delta),
// u = (i_alpha dq, v_phi dq, i_gamma dq, v_delta, v_gamma dq, i_eps),
// w = (i*_gamma,Q, V*), y = v*_alpha dq.
LtpModel build_control_software(const CiderParams& params);

// AC-only variant: ideal actuator v_alpha = v*_alpha.  x = (i_alpha, v_phi, i_gamma) abc,
// u = v*_alpha abc, w = v_gamma abc, y = (x, v_gamma abc).
LtpModel build_power_hardware_ac_only(const CiderParams& params);
// x = integrals of (di_alpha, dv_phi, di_gamma) dq, u = (i_alpha, v_phi, i_gamma, v_gamma) dq,
// w = (i*_gamma,D, i*_gamma,Q), y = v*_alpha dq.
LtpModel build_control_software_ac_only(const CiderParams& params);

// Closed loop of two LTP blocks with feedback u = T y, where
// u = (u_pi, u_kappa), y = (y_pi, y_kappa) and w = (w_pi, w_kappa).
class GridResponse {
 public:
  GridResponse(const LtpModel& pi, const LtpModel& kappa, const FourierMatrix& feedback, const HarmonicIndexSet& set);

  const HarmonicIndexSet& index_set() const { return set_; }
  int ny() const { return ny_; }
  int nw() const { return nw_; }
  int nx() const { return nx_; }

  HarmonicSignal respond(const HarmonicSignal& w) const;
  HarmonicSignal states(const HarmonicSignal& w) const;
  // Lifted dY[out channels]/dW[in channels].
  MatrixXcd gain(int out_first, int out_count, int in_first, int in_count) const;

 private:
  HarmonicIndexSet set_;
  int nx_, ny_, nw_;
  SparseMatrixC e_cl_, c_cl_, f_cl_;
  // factorisation is immutable after construction, copies share it
  std::shared_ptr<const Eigen::SparseLU<SparseMatrixC>> lu_;
};

// Lifted 0/1 matrix picking `count` channels starting at `first` out of `total`.
SparseMatrixC channel_selector(const HarmonicIndexSet& set, int total, int first, int count);

struct ReciprocalResult {
  HarmonicSignal value;  // 1 channel
  MatrixXcd jacobian;    // d value / d input (lifted)
};

// Second-order Taylor reciprocal 1/v around the h = 0 component of a
// one-channel spectrum.  min_abs guards the expansion point.
ReciprocalResult taylor_reciprocal(const HarmonicSignal& v, double min_abs);
// Q-axis current reference Q*/v_gamma,D from the abc grid voltage; the
// Jacobian is taken with respect to the abc spectrum.
ReciprocalResult reference_q_current(const HarmonicSignal& v_gamma_abc, double q_var, double v_base_rms = 230.0);

HarmonicSignal thevenin_response(const HarmonicSignal& i_s, const TheveninSpec& te);

// A grid-following converter tied to one node.
class GridFollowingCider {
 public:
  GridFollowingCider(std::string name, std::string node, const CiderParams& params, const Setpoints& sp,
                     bool dc_side, const HarmonicIndexSet& set, double v_base_rms = 230.0);

  const std::string& name() const { return name_; }
  const std::string& node() const { return node_; }
  const CiderParams& params() const { return params_; }
  const Setpoints& setpoints() const { return sp_; }
  bool dc_side() const { return dc_side_; }
  const HarmonicIndexSet& index_set() const { return set_; }

  // Balanced fundamental operating point at nominal voltage.
  OperatingPoint flat_start() const;
  void set_operating_point(const OperatingPoint& op);
  const OperatingPoint& operating_point() const { return op_; }
  const GridResponse& response() const { return *response_; }

  // Full disturbance vector for a given grid voltage (abc).
  HarmonicSignal disturbance(const HarmonicSignal& v_grid) const;
  // Closed-loop outputs (y_pi, y_kappa) for a given grid voltage.
  HarmonicSignal outputs(const HarmonicSignal& v_grid) const;

  struct Injection {
    HarmonicSignal current;  // injected into the node
    MatrixXcd jacobian;      // d current / d v_grid (lifted, frozen op)
  };
  Injection grid_current(const HarmonicSignal& v_grid, bool with_jacobian) const;

  OperatingPoint extract_operating_point(const HarmonicSignal& y) const;
  HarmonicSignal dc_voltage(const HarmonicSignal& y) const;
  HarmonicSignal grid_current_of(const HarmonicSignal& y) const;

  // Output channel layout.
  int ny_pi() const { return dc_side_ ? 14 : 12; }
  int y_kappa_first() const { return ny_pi(); }

 private:
  void rebuild();

  std::string name_, node_;
  CiderParams params_;
  Setpoints sp_;
  bool dc_side_;
  HarmonicIndexSet set_;
  double v_base_;
  OperatingPoint op_;
  std::optional<GridResponse> response_;
};

}  // namespace hpf
