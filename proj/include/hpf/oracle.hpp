#pragma once

// Nonlinear time-domain reference: fixed-step RK4 on the lumped network and
// average-model converters, DFT of the settled waveforms, and the comparison
// metrics between two sets of spectra.

#include <map>
#include <string>
#include <vector>

#include "hpf/cider.hpp"
#include "hpf/network.hpp"

namespace hpf {

struct TdsCider {
  std::string name;
  std::string node;
  CiderParams params;
  Setpoints setpoints;
  bool dc_side = true;
};

struct TdsOptions {
  int samples_per_period = 40800;  // multiple of 2*(2*h_max+1)
  double max_duration_s = 2.0;
  double settle_tolerance_pu = 1e-9;  // period-to-period change of physical states
  int min_periods = 5;
  int dft_periods = 5;
  int record_samples_per_period = 1020;  // must divide samples_per_period
  double guard = 1e7;                    // |state| bound before declaring blow-up
};

struct Waveforms {
  double f1 = 50.0;
  int samples_per_period = 0;
  std::vector<double> time;
  std::vector<std::string> channels;
  Eigen::MatrixXd values;  // samples x channels
};

struct TdsResult {
  Waveforms waveforms;
  std::map<std::string, HarmonicSignal> node_voltages;
  std::map<std::string, HarmonicSignal> node_currents;
  std::map<std::string, HarmonicSignal> dc_voltages;
  bool settled = false;
  double simulated_s = 0.0;
  double seconds = 0.0;
  double final_period_change_pu = 0.0;
};

// Average model of one converter in the time domain.
class TdsCiderModel {
 public:
  TdsCiderModel(const TdsCider& spec, double f1);
  static constexpr int kStates = 17;  // i_alpha, v_phi, i_gamma, v_delta, 7 integrators
  const TdsCider& spec() const { return spec_; }

  struct Diagnostics {
    Eigen::Vector3d v_alpha, v_alpha_ref, i_alpha;
    double v_delta = 0.0, i_delta = 0.0, i_eps = 0.0;
  };
  // d(state)/dt for grid voltage v_grid at time t.
  void derivatives(double t, const double* x, const Eigen::Vector3d& v_grid, double* dx,
                   Diagnostics* diag = nullptr) const;

 private:
  TdsCider spec_;
  double w1_;
};

class TimeDomainSimulator {
 public:
  TimeDomainSimulator(const NetworkSpec& net, const std::vector<TdsCider>& ciders, double f1);

  int state_size() const { return n_states_; }
  Eigen::VectorXd initial_state() const;
  void derivatives(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) const;
  void rk4_step(double t, double dt, Eigen::VectorXd& x) const;
  // Physical states normalized to p.u. (integrators excluded).
  double periodic_change_pu(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  std::vector<std::string> channel_names() const;
  Eigen::VectorXd channel_values(double t, const Eigen::VectorXd& x) const;

  TdsResult run(const TdsOptions& options, const HarmonicIndexSet& set) const;

 private:
  struct Branch {
    int a = -1, b = -1;  // node indices, -1 = ground
    Eigen::Matrix3d r, linv;
    int offset = 0;
  };
  struct Node {
    enum Kind { Capacitive, Algebraic, Source } kind = Algebraic;
    Eigen::Matrix3d cap = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d cinv, g = Eigen::Matrix3d::Zero();
    int offset = -1;  // state offset (capacitive) or algebraic slot
    int source = -1;
  };

  void node_voltages(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& v) const;

  NetworkSpec net_;
  double f1_, w1_;
  std::vector<std::string> node_names_;
  std::vector<Node> nodes_;
  std::vector<Branch> branches_;
  std::vector<int> line_branch_, source_branch_, load_branch_, load_node_;
  std::vector<TdsCiderModel> ciders_;
  std::vector<int> cider_node_, cider_offset_;
  std::vector<int> algebraic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> alg_lu_;
  int n_states_ = 0;
};

// DFT over exactly dft_periods whole periods at the end of the record.
HarmonicSignal dft_extract(const Waveforms& w, const std::vector<int>& channels, const HarmonicIndexSet& set,
                           int periods = 5);

struct KpiEntry {
  int h = 0;
  double e_abs = 0.0;  // p.u.
  double e_arg = 0.0;  // rad, NaN when either magnitude is below the floor
};

// e_abs, e_arg per order h >= 0, maxima over phases.
std::vector<KpiEntry> compare_spectra(const HarmonicSignal& a, const HarmonicSignal& b, double base,
                                      double arg_floor_pu = 1e-3);
double max_abs_error(const std::vector<KpiEntry>& k);
double max_arg_error(const std::vector<KpiEntry>& k);

// THD in percent per channel; NaN when the fundamental vanishes.
std::vector<double> thd_percent(const HarmonicSignal& s);
double max_thd_percent(const HarmonicSignal& s);

}  // namespace hpf
