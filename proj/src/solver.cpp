#include "hpf/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "hpf/error.hpp"

namespace hpf {

double pu_magnitude(Complex x, int h, double base) {
  return (h == 0 ? std::abs(x) : std::sqrt(2.0) * std::abs(x)) / base;
}

double max_pu(const HarmonicSignal& s, double base) {
  double m = 0.0;
  const auto& set = s.index_set();
  for (int h = -set.h_max(); h <= set.h_max(); ++h)
    for (int c = 0; c < s.channels(); ++c) m = std::max(m, pu_magnitude(s(c, h), h, base));
  return m;
}

std::vector<std::string> following_nodes(const std::vector<GridFollowingCider>& ciders) {
  std::vector<std::string> out;
  for (const auto& c : ciders) out.push_back(c.node());
  return out;
}

namespace {

const HarmonicIndexSet& common_set(const std::vector<GridFollowingCider>& ciders, const NetworkSpec& net) {
  (void)net;
  if (ciders.empty()) throw Error(ErrorKind::Structural, "power flow needs at least one converter");
  for (const auto& c : ciders)
    if (!(c.index_set() == ciders.front().index_set()))
      throw Error(ErrorKind::Structural, "converters use different index sets");
  return ciders.front().index_set();
}

}  // namespace

HpfProblem::HpfProblem(const NetworkSpec& net, std::vector<GridFollowingCider>& ciders)
    : net_(net), ciders_(ciders), grid_(net, following_nodes(ciders), common_set(ciders, net)) {
  for (const auto& s : net_.sources) emf_.push_back(s.emf(index_set()));
}

Eigen::Index HpfProblem::size() const {
  return static_cast<Eigen::Index>(grid_.forming().size() + grid_.following().size()) * 3 * index_set().size();
}

HpfUnknowns HpfProblem::flat_start() const {
  HpfUnknowns u;
  for (std::size_t s = 0; s < grid_.forming().size(); ++s) u.i_s.emplace_back(index_set(), 3);
  for (std::size_t r = 0; r < grid_.following().size(); ++r)
    u.v_r.push_back(balanced_set(index_set(), 1, std::sqrt(2.0) * net_.v_base_rms, 0.0));
  return u;
}

VectorXcd HpfProblem::stack(const HpfUnknowns& u) const {
  const Eigen::Index block = 3 * index_set().size();
  VectorXcd z(size());
  Eigen::Index off = 0;
  for (const auto& s : u.i_s) z.segment(off, block) = s.stacked(), off += block;
  for (const auto& v : u.v_r) z.segment(off, block) = v.stacked(), off += block;
  return z;
}

HpfUnknowns HpfProblem::unstack(const VectorXcd& z) const {
  const Eigen::Index block = 3 * index_set().size();
  HpfUnknowns u;
  Eigen::Index off = 0;
  for (std::size_t s = 0; s < grid_.forming().size(); ++s, off += block)
    u.i_s.emplace_back(index_set(), 3, z.segment(off, block));
  for (std::size_t r = 0; r < grid_.following().size(); ++r, off += block)
    u.v_r.emplace_back(index_set(), 3, z.segment(off, block));
  return u;
}

namespace {

// Network side of the hybrid equations: (V_S, I_R) from (I_S, V_R).
void grid_side(const HybridGrid& g, const HpfUnknowns& u, std::vector<HarmonicSignal>& v_s,
               std::vector<HarmonicSignal>& i_r) {
  const auto& set = g.index_set();
  const int ns = static_cast<int>(u.i_s.size()), nr = static_cast<int>(u.v_r.size());
  v_s.assign(ns, HarmonicSignal(set, 3));
  i_r.assign(nr, HarmonicSignal(set, 3));
  VectorXcd is(3 * ns), vr(3 * nr);
  for (int h = -set.h_max(); h <= set.h_max(); ++h) {
    for (int s = 0; s < ns; ++s)
      for (int p = 0; p < 3; ++p) is(3 * s + p) = u.i_s[s](p, h);
    for (int r = 0; r < nr; ++r)
      for (int p = 0; p < 3; ++p) vr(3 * r + p) = u.v_r[r](p, h);
    const HybridEntry& e = g.at(h);
    const VectorXcd vs = e.ss * is + (nr ? VectorXcd(e.sr * vr) : VectorXcd::Zero(3 * ns));
    const VectorXcd ir = nr ? VectorXcd(e.rs * is + e.rr * vr) : VectorXcd();
    for (int s = 0; s < ns; ++s)
      for (int p = 0; p < 3; ++p) v_s[s](p, h) = vs(3 * s + p);
    for (int r = 0; r < nr; ++r)
      for (int p = 0; p < 3; ++p) i_r[r](p, h) = ir(3 * r + p);
  }
}

}  // namespace

VectorXcd HpfProblem::residuals(const HpfUnknowns& u) const {
  std::vector<HarmonicSignal> v_s, i_r;
  grid_side(grid_, u, v_s, i_r);
  HpfUnknowns r;
  for (std::size_t s = 0; s < v_s.size(); ++s) {
    HarmonicSignal d = v_s[s];
    d.stacked() -= emf_[s].stacked();
    r.i_s.push_back(d);
  }
  for (std::size_t k = 0; k < i_r.size(); ++k) {
    HarmonicSignal d = i_r[k];
    d.stacked() -= ciders_[k].grid_current(u.v_r[k], false).current.stacked();
    r.v_r.push_back(d);
  }
  return stack(r);
}

double HpfProblem::residual_norm(const VectorXcd& r) const {
  const auto& set = index_set();
  const Eigen::Index block = 3 * set.size();
  const Eigen::Index n_volt = static_cast<Eigen::Index>(grid_.forming().size()) * block;
  double m = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const int h = set.order(static_cast<int>((i % block) / 3));
    const double base = i < n_volt ? net_.v_base_rms : net_.i_base_rms();
    m = std::max(m, pu_magnitude(r(i), h, base));
  }
  return m;
}

MatrixXcd HpfProblem::jacobian(const HpfUnknowns& u) const {
  const auto& set = index_set();
  const int ns = static_cast<int>(grid_.forming().size()), nr = static_cast<int>(grid_.following().size());
  const Eigen::Index block = 3 * set.size();
  MatrixXcd j = MatrixXcd::Zero(size(), size());
  // Unknown (node n, phase p, order h) sits at n*block + pos(h)*3 + p.
  auto idx = [&](int node, int p, int h) { return node * block + set.position(h) * 3 + p; };
  for (int h = -set.h_max(); h <= set.h_max(); ++h) {
    const HybridEntry& e = grid_.at(h);
    for (int a = 0; a < ns + nr; ++a)
      for (int b = 0; b < ns + nr; ++b)
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) {
            Complex v;
            if (a < ns && b < ns) v = e.ss(3 * a + p, 3 * b + q);
            else if (a < ns) v = e.sr(3 * a + p, 3 * (b - ns) + q);
            else if (b < ns) v = e.rs(3 * (a - ns) + p, 3 * b + q);
            else v = e.rr(3 * (a - ns) + p, 3 * (b - ns) + q);
            j(idx(a, p, h), idx(b, q, h)) = v;
          }
  }
  for (int k = 0; k < nr; ++k) {
    const auto inj = ciders_[k].grid_current(u.v_r[k], true);
    j.block((ns + k) * block, (ns + k) * block, block, block) -= inj.jacobian;
  }
  return j;
}

MatrixXcd HpfProblem::jacobian_fd(const HpfUnknowns& u, double step) const {
  const VectorXcd z = stack(u);
  MatrixXcd j(size(), size());
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    VectorXcd zp = z, zm = z;
    zp(c) += step;
    zm(c) -= step;
    j.col(c) = (residuals(unstack(zp)) - residuals(unstack(zm))) / (2.0 * step);
  }
  return j;
}

void HpfProblem::update_operating_points(const HpfUnknowns& u) {
  for (std::size_t k = 0; k < ciders_.size(); ++k) {
    if (!ciders_[k].dc_side()) continue;
    ciders_[k].set_operating_point(ciders_[k].extract_operating_point(ciders_[k].outputs(u.v_r[k])));
  }
}

void HpfProblem::reset_operating_points() {
  for (auto& c : ciders_)
    if (c.dc_side()) c.set_operating_point(c.flat_start());
}

HpfSolution HpfProblem::solve(const HpfOptions& options, const HpfUnknowns* start) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorKind::Solver, "epsilon must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  reset_operating_points();
  HpfSolution sol;
  HpfUnknowns u = start ? *start : flat_start();
  for (int it = 0;; ++it) {
    VectorXcd r = residuals(u);
    const double norm = residual_norm(r);
    sol.residual_trace.push_back(norm);
    if (!std::isfinite(norm)) throw Error(ErrorKind::Solver, "residual is not finite at iteration " + std::to_string(it));
    if (norm < options.epsilon) {
      sol.converged = true;
      sol.iterations = it;
      break;
    }
    if (it >= options.max_iter) {
      sol.iterations = it;
      std::string trace;
      for (double t : sol.residual_trace) trace += " " + std::to_string(t);
      throw Error(ErrorKind::Solver, "no convergence in " + std::to_string(options.max_iter) +
                                         " iterations; residual trace (p.u.):" + trace);
    }
    const MatrixXcd j = options.fd_jacobian ? jacobian_fd(u, 1e-3) : jacobian(u);
    Eigen::PartialPivLU<MatrixXcd> lu(j);
    if (!(lu.rcond() > 1e-16)) throw Error(ErrorKind::Solver, "singular Jacobian at iteration " + std::to_string(it));
    const VectorXcd z = stack(u);
    VectorXcd dz = lu.solve(r);
    VectorXcd zn = z - dz;
    if (options.step_halving) {
      for (int k = 0; k < 10 && residual_norm(residuals(unstack(zn))) > norm; ++k) {
        dz *= 0.5;
        zn = z - dz;
      }
    }
    u = unstack(zn);
    for (auto& s : u.i_s) s.make_real();
    for (auto& v : u.v_r) v.make_real();
    update_operating_points(u);
  }
  sol.unknowns = u;
  finish(sol);
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

void HpfProblem::finish(HpfSolution& sol) const {
  const auto& set = index_set();
  const HpfUnknowns& u = sol.unknowns;
  grid_side(grid_, u, sol.v_s, sol.i_r);
  sol.ops.clear();
  sol.outputs.clear();
  sol.node_voltages.clear();
  sol.node_currents.clear();
  sol.dc_voltages.clear();

  const int ns = static_cast<int>(grid_.forming().size()), nr = static_cast<int>(grid_.following().size());
  for (int s = 0; s < ns; ++s) sol.node_voltages[grid_.forming()[s]] = sol.v_s[s];
  for (int r = 0; r < nr; ++r) sol.node_voltages[grid_.following()[r]] = u.v_r[r];
  const auto& elim = grid_.eliminated();
  std::vector<HarmonicSignal> ve(elim.size(), HarmonicSignal(set, 3));
  VectorXcd kept(3 * (ns + nr));
  for (int h = -set.h_max(); h <= set.h_max(); ++h) {
    for (int s = 0; s < ns; ++s)
      for (int p = 0; p < 3; ++p) kept(3 * s + p) = sol.v_s[s](p, h);
    for (int r = 0; r < nr; ++r)
      for (int p = 0; p < 3; ++p) kept(3 * (ns + r) + p) = u.v_r[r](p, h);
    const VectorXcd v = grid_.recovery(h) * kept;
    for (std::size_t e = 0; e < elim.size(); ++e)
      for (int p = 0; p < 3; ++p) ve[e](p, h) = v(3 * e + p);
  }
  for (std::size_t e = 0; e < elim.size(); ++e) sol.node_voltages[elim[e]] = ve[e];

  for (int s = 0; s < ns; ++s) sol.node_currents[net_.sources[s].node] = u.i_s[s];
  for (int r = 0; r < nr; ++r) sol.node_currents[ciders_[r].name()] = sol.i_r[r];
  for (const auto& ld : net_.loads) {
    const HarmonicSignal& v = sol.node_voltages.at(ld.node);
    HarmonicSignal i(set, 3);
    for (int h = -set.h_max(); h <= set.h_max(); ++h) {
      const Eigen::Vector3cd y = load_admittance(ld, net_.v_base_rms, h);
      for (int p = 0; p < 3; ++p) i(p, h) = y(p) * v(p, h);
    }
    sol.node_currents[ld.node] = i;
  }
  if (ciders_.size() == static_cast<std::size_t>(nr) && !sol.residual_trace.empty()) {
    for (int r = 0; r < nr; ++r) {
      const HarmonicSignal y = ciders_[r].outputs(u.v_r[r]);
      sol.outputs.push_back(y);
      sol.ops.push_back(ciders_[r].operating_point());
      sol.dc_voltages[ciders_[r].name()] = ciders_[r].dc_voltage(y);
    }
  }
}

HpfSolution solve_hpf(const NetworkSpec& net, std::vector<GridFollowingCider>& ciders, const HpfOptions& options) {
  HpfProblem problem(net, ciders);
  return problem.solve(options);
}

HpfUnknowns perturbed_start(const HpfProblem& problem, std::uint64_t seed, double magnitude_pu) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(-magnitude_pu, magnitude_pu);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  HpfUnknowns u = problem.flat_start();
  const double peak = std::sqrt(2.0) * problem.network().v_base_rms;
  const Complex a = std::polar(1.0, -2.0 * kPi / 3.0);
  for (auto& v : u.v_r) {
    for (int seq = 0; seq < 3; ++seq) {  // positive, negative, zero
      const Complex c = 0.5 * peak * mag(rng) * std::polar(1.0, phase(rng));
      for (int p = 0; p < 3; ++p) {
        const Complex rot = seq == 0 ? std::pow(a, p) : seq == 1 ? std::pow(std::conj(a), p) : Complex(1.0);
        v(p, 1) += c * rot;
        v(p, -1) += std::conj(c * rot);
      }
    }
  }
  return u;
}

AlphaRatios compute_alpha_ratios(const CiderParams& params, const Setpoints& rated, const TheveninSpec& te, bool dc_side,
                                 const HarmonicIndexSet& set, const HpfOptions& options) {
  NetworkSpec net;
  net.nodes = {"PCC"};
  TheveninSpec src = te;
  src.node = "PCC";
  net.sources = {src};
  std::vector<GridFollowingCider> ciders;
  ciders.emplace_back("rated", "PCC", params, rated, dc_side, set);
  const HpfSolution sol = solve_hpf(net, ciders, options);
  const HarmonicSignal& i = sol.i_r.front();
  AlphaRatios out{HarmonicSignal(set, 3)};
  for (int p = 0; p < 3; ++p) {
    const Complex i1 = i(p, 1);
    if (std::abs(i1) < 1e-9 * std::max(1.0, i.stacked().cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::Degenerate, "fundamental current is zero; ratios undefined");
    for (int h = 0; h <= set.h_max(); ++h) {
      out.alpha(p, h) = i(p, h) / i1;
      if (h > 0) out.alpha(p, -h) = std::conj(out.alpha(p, h));
    }
  }
  return out;
}

HpfSolution solve_dhpf(const NetworkSpec& net, const std::vector<GridFollowingCider>& ciders,
                       const std::vector<AlphaRatios>& ratios, const HpfOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (ratios.size() != ciders.size()) throw Error(ErrorKind::Structural, "one ratio set per converter is required");
  const HarmonicIndexSet& set = common_set(ciders, net);
  const HarmonicIndexSet fund(set.f1(), 1);

  std::vector<GridFollowingCider> c1;
  for (const auto& c : ciders) c1.emplace_back(c.name(), c.node(), c.params(), c.setpoints(), c.dc_side(), fund);
  HpfProblem p1(net, c1);
  const HpfSolution s1 = p1.solve(options);

  std::vector<GridFollowingCider> cf;
  for (const auto& c : ciders) cf.emplace_back(c.name(), c.node(), c.params(), c.setpoints(), c.dc_side(), set);
  HpfProblem pf(net, cf);
  const HybridGrid& g = pf.grid();
  const int ns = static_cast<int>(g.forming().size()), nr = static_cast<int>(g.following().size());

  std::vector<HarmonicSignal> i_r(nr, HarmonicSignal(set, 3));
  for (int r = 0; r < nr; ++r)
    for (int p = 0; p < 3; ++p) {
      const Complex i1 = s1.i_r[r](p, 1);
      for (int h = 0; h <= set.h_max(); ++h) {
        const Complex v = h == 1 ? i1 : ratios[r].alpha.on(set)(p, h) * i1;
        i_r[r](p, h) = v;
        if (h > 0) i_r[r](p, -h) = std::conj(v);
      }
    }

  HpfSolution sol;
  sol.unknowns = pf.flat_start();
  std::vector<HarmonicSignal> emf;
  for (const auto& s : net.sources) emf.push_back(s.emf(set));
  for (int h = -set.h_max(); h <= set.h_max(); ++h) {
    const HybridEntry& e = g.at(h);
    const int n = 3 * (ns + nr);
    MatrixXcd m(n, n);
    m << e.ss, e.sr, e.rs, e.rr;
    VectorXcd rhs(n);
    for (int s = 0; s < ns; ++s)
      for (int p = 0; p < 3; ++p) rhs(3 * s + p) = emf[s](p, h);
    for (int r = 0; r < nr; ++r)
      for (int p = 0; p < 3; ++p) rhs(3 * (ns + r) + p) = i_r[r](p, h);
    const VectorXcd x = m.partialPivLu().solve(rhs);
    for (int s = 0; s < ns; ++s)
      for (int p = 0; p < 3; ++p) sol.unknowns.i_s[s](p, h) = x(3 * s + p);
    for (int r = 0; r < nr; ++r)
      for (int p = 0; p < 3; ++p) sol.unknowns.v_r[r](p, h) = x(3 * (ns + r) + p);
  }
  sol.converged = s1.converged;
  sol.iterations = s1.iterations;
  sol.residual_trace = s1.residual_trace;
  pf.finish(sol);
  sol.outputs.clear();
  sol.ops.clear();
  sol.dc_voltages.clear();
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace hpf
