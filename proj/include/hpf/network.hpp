#pragma once

// Three-phase network model: lines, constant-impedance loads, Thevenin
// sources, per-harmonic nodal admittance and the hybrid (forming/following)
// description used by the power-flow solver.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hpf/harmonic.hpp"

namespace hpf {

using Matrix3cd = Eigen::Matrix3cd;

// Sequence parameters per km; totals are value * length_m / 1000.
struct LineSpec {
  std::string from;
  std::string to;
  double length_m = 0.0;
  double r_pos_ohm_per_km = 0.0;
  double r_zero_ohm_per_km = 0.0;
  double l_pos_h_per_km = 0.0;
  double l_zero_h_per_km = 0.0;
  double c_pos_f_per_km = 0.0;
  double c_zero_f_per_km = 0.0;
};

// Constant-impedance load sized at the base voltage.  power_w > 0 consumes.
struct LoadSpec {
  std::string node;
  double power_w = 0.0;
  double power_factor = 1.0;
  std::array<double, 3> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
};

// Voltage source behind R + j*h*X per phase.  Harmonic magnitudes are in
// p.u. of the nominal voltage, phases in rad.
struct TheveninSpec {
  std::string node;
  double v_nominal_rms = 230.0;
  double z_abs_ohm = 0.0;
  double r_over_x = 1.0;
  std::map<int, std::pair<double, double>> harmonics{{1, {1.0, 0.0}}};

  double resistance() const;
  double reactance() const;  // at f1
  Complex impedance(int h) const;
  HarmonicSignal emf(const HarmonicIndexSet& set) const;
};

struct NetworkSpec {
  std::vector<std::string> nodes;
  std::vector<LineSpec> lines;
  std::vector<LoadSpec> loads;
  std::vector<TheveninSpec> sources;
  double v_base_rms = 230.0;
  double p_base_w = 50e3;

  double i_base_rms() const { return p_base_w / (3.0 * v_base_rms); }
  int node_index(const std::string& name) const;  // -1 when absent
  void validate() const;
};

// Electrical node list used by assembly: the named nodes followed by one
// internal EMF node per Thevenin source ("<bus>.emf").
std::vector<std::string> electrical_nodes(const NetworkSpec& net);
std::string emf_node_name(const TheveninSpec& source);

struct PhaseBlocks {
  Matrix3cd z_series;
  Matrix3cd y_shunt_half;  // per terminal
};

Matrix3cd fortescue();
// Phase-domain pi-section of a line at frequency f (Hz).
PhaseBlocks sequence_to_phase(const LineSpec& line, double f);
// Per-phase admittance diag of a load at harmonic order h (|h| scales X).
Eigen::Vector3cd load_admittance(const LoadSpec& load, double v_base_rms, int h);
// Per-phase series R, L of a load.
std::pair<Eigen::Vector3d, Eigen::Vector3d> load_rl(const LoadSpec& load, double v_base_rms, double f1);

// Compound nodal admittance over electrical_nodes() at harmonic h of f1.
MatrixXcd assemble_admittance(const NetworkSpec& net, double f1, int h);

// Schur complement keeping the listed nodes (3 rows per node, in order).
MatrixXcd kron_reduce(const MatrixXcd& y, const std::vector<int>& keep_nodes);
// Voltage-recovery map V_eliminated = R * V_kept for the same split.
MatrixXcd kron_recovery(const MatrixXcd& y, const std::vector<int>& keep_nodes);

struct HybridEntry {
  MatrixXcd ss, sr, rs, rr;
};

// y is ordered as [forming nodes; following nodes], n_forming of them first.
HybridEntry hybrid_from_admittance(const MatrixXcd& y, int n_forming);

// Hybrid description of the whole network at every order of an index set.
class HybridGrid {
 public:
  HybridGrid(const NetworkSpec& net, const std::vector<std::string>& following, const HarmonicIndexSet& set);

  const HarmonicIndexSet& index_set() const { return set_; }
  const std::vector<std::string>& forming() const { return forming_; }
  const std::vector<std::string>& following() const { return following_; }
  const std::vector<std::string>& eliminated() const { return eliminated_; }
  const HybridEntry& at(int h) const { return entries_[set_.position(h)]; }
  // V_eliminated(h) = recovery(h) * [V_S(h); V_R(h)]
  const MatrixXcd& recovery(int h) const { return recovery_[set_.position(h)]; }
  const std::vector<TheveninSpec>& sources() const { return sources_; }

 private:
  HarmonicIndexSet set_;
  std::vector<std::string> forming_, following_, eliminated_;
  std::vector<TheveninSpec> sources_;
  std::vector<HybridEntry> entries_;
  std::vector<MatrixXcd> recovery_;
};

}  // namespace hpf
