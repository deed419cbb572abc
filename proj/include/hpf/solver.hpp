#pragma once

// Harmonic power flow: Newton-Raphson over (I_S, V_R) with operating-point
// refresh of the converter models, plus the decoupled baseline.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hpf/cider.hpp"
#include "hpf/network.hpp"

namespace hpf {

struct HpfOptions {
  double epsilon = 1e-8;  // p.u.
  int max_iter = 50;
  bool step_halving = false;  // halve the step while the residual grows
  bool fd_jacobian = false;   // finite-difference Jacobian (diagnosis only)
};

struct HpfUnknowns {
  std::vector<HarmonicSignal> i_s;  // per forming node
  std::vector<HarmonicSignal> v_r;  // per following node
};

struct HpfSolution {
  HpfUnknowns unknowns;
  std::vector<HarmonicSignal> v_s;     // forming-node voltages
  std::vector<HarmonicSignal> i_r;     // following-node injections
  std::vector<OperatingPoint> ops;     // per converter
  std::vector<HarmonicSignal> outputs; // per converter closed-loop outputs
  std::vector<double> residual_trace;  // max residual (p.u.) per iteration
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  // Named node quantities: voltages of every electrical node, currents
  // injected by sources (at their bus), converters and loads (drawn).
  std::map<std::string, HarmonicSignal> node_voltages;
  std::map<std::string, HarmonicSignal> node_currents;
  std::map<std::string, HarmonicSignal> dc_voltages;  // per converter name
};

// Per-unit scale of a spectrum entry: RMS phasor magnitude over the base.
double pu_magnitude(Complex x, int h, double base);
double max_pu(const HarmonicSignal& s, double base);

class HpfProblem {
 public:
  HpfProblem(const NetworkSpec& net, std::vector<GridFollowingCider>& ciders);

  const HybridGrid& grid() const { return grid_; }
  const NetworkSpec& network() const { return net_; }
  std::vector<GridFollowingCider>& ciders() { return ciders_; }
  const HarmonicIndexSet& index_set() const { return grid_.index_set(); }

  HpfUnknowns flat_start() const;
  VectorXcd stack(const HpfUnknowns& u) const;
  HpfUnknowns unstack(const VectorXcd& z) const;
  Eigen::Index size() const;

  // Stacked (dV_S, dI_R) for the current operating points.
  VectorXcd residuals(const HpfUnknowns& u) const;
  MatrixXcd jacobian(const HpfUnknowns& u) const;
  MatrixXcd jacobian_fd(const HpfUnknowns& u, double step) const;
  // Max residual in p.u.
  double residual_norm(const VectorXcd& r) const;
  // Refresh each converter's operating point from its outputs at u.
  void update_operating_points(const HpfUnknowns& u);
  void reset_operating_points();

  HpfSolution solve(const HpfOptions& options, const HpfUnknowns* start = nullptr);
  // Fill the derived fields of a solution from its unknowns.
  void finish(HpfSolution& sol) const;

 private:
  NetworkSpec net_;
  std::vector<GridFollowingCider>& ciders_;
  HybridGrid grid_;
  std::vector<HarmonicSignal> emf_;
};

std::vector<std::string> following_nodes(const std::vector<GridFollowingCider>& ciders);

HpfSolution solve_hpf(const NetworkSpec& net, std::vector<GridFollowingCider>& ciders, const HpfOptions& options);

// Initial point distorted by random positive/negative/zero-sequence
// fundamental components on every following node.
HpfUnknowns perturbed_start(const HpfProblem& problem, std::uint64_t seed, double magnitude_pu = 0.2);

// Harmonic current ratios I_h / I_1 per phase of one converter.
struct AlphaRatios {
  HarmonicSignal alpha;  // 3 channels
};

AlphaRatios compute_alpha_ratios(const CiderParams& params, const Setpoints& rated, const TheveninSpec& te, bool dc_side,
                                 const HarmonicIndexSet& set, const HpfOptions& options);

// Fundamental power flow followed by independent per-harmonic solves with
// converter currents fixed at alpha_h * I_1.  ratios are per converter.
HpfSolution solve_dhpf(const NetworkSpec& net, const std::vector<GridFollowingCider>& ciders,
                       const std::vector<AlphaRatios>& ratios, const HpfOptions& options);

}  // namespace hpf
