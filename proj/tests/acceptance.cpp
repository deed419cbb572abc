// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Artifacts go to $HPF_OUT_DIR or ./acceptance_out.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "hpf/error.hpp"
#include "hpf/report.hpp"
#include "hpf/scenario.hpp"

using namespace hpf;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << title << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string out_dir() {
  const char* env = std::getenv("HPF_OUT_DIR");
  const std::string d = env && *env ? env : "acceptance_out";
  fs::create_directories(d);
  return d;
}

Scenario load(const std::string& f) { return load_scenario(std::string(HPF_SCENARIO_DIR) + "/" + f); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpectraReport run_hpf(const Scenario& s, int dc, const std::string& name, const HpfUnknowns* start = nullptr,
                      int* iterations = nullptr) {
  const NetworkSpec net = s.network();
  auto ciders = s.make_ciders(dc);
  HpfProblem p(net, ciders);
  const HpfSolution sol = p.solve(s.study.hpf, start);
  if (iterations) *iterations = sol.iterations;
  return make_report(name, sol, net);
}

SpectraReport run_tds(const Scenario& s, const TdsOptions& o) {
  TimeDomainSimulator sim(s.network(), s.make_tds_ciders(), s.f1_hz);
  const TdsResult r = sim.run(o, s.index_set());
  if (!r.settled) std::cout << "      note: time-domain run did not settle (" << r.final_period_change_pu << ")\n";
  return make_report("tds", r, s.network());
}

// Largest p.u. difference between two reports over every spectrum they share.
double report_distance(const SpectraReport& a, const SpectraReport& b) {
  double d = 0.0;
  auto walk = [&](const SpectrumMap& x, const SpectrumMap& y, double base) {
    for (const auto& [n, s] : x) {
      const HarmonicSignal& t = y.at(n);
      for (int c = 0; c < s.channels(); ++c)
        for (int h = 0; h <= s.index_set().h_max(); ++h) d = std::max(d, pu_magnitude(s(c, h) - t(c, h), h, base));
    }
  };
  walk(a.voltages, b.voltages, a.v_base_rms);
  walk(a.currents, b.currents, a.i_base_rms);
  walk(a.dc_voltages, b.dc_voltages, a.v_base_rms);
  return d;
}

double report_asymmetry(const SpectraReport& r) {
  double worst = 0.0;
  for (const SpectrumMap* m : {&r.voltages, &r.currents, &r.dc_voltages})
    for (const auto& [n, s] : *m) worst = std::max(worst, s.conjugate_asymmetry() / std::max(1.0, s.stacked().cwiseAbs().maxCoeff()));
  return worst;
}

void write_pair(const std::string& dir, const std::string& tag, const SpectraReport& a, const SpectraReport& b,
                const KpiReport& k) {
  write_text(dir + "/" + tag + "_" + a.study + "_spectra.json", spectra_json(a));
  write_text(dir + "/" + tag + "_" + b.study + "_spectra.json", spectra_json(b));
  write_text(dir + "/" + tag + "_kpi.json", kpi_json(k));
  write_text(dir + "/" + tag + "_errors_current.svg", error_svg(tag + " current errors", k.current));
  write_text(dir + "/" + tag + "_errors_voltage.svg", error_svg(tag + " voltage errors", k.voltage));
}

// ---------------------------------------------------------------- criteria

struct Shared {
  SpectraReport single_tds;   // 40800 samples per period
  double bench_floor = 0.0;   // worst benchmark current error against the oracle
};

void single_validation(Shared& sh, const std::string& dir) {
  const Scenario s = load("single_cider_te.json");
  const auto t0 = std::chrono::steady_clock::now();
  const SpectraReport h = run_hpf(s, -1, "hpf");
  const double t_hpf = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  sh.single_tds = run_tds(s, s.study.tds);
  const double t_tds = seconds_since(t1);
  const KpiReport k = compare_reports(h, sh.single_tds);
  write_pair(dir, "single", h, sh.single_tds, k);

  const double ia = k.current.max_abs(), ig = k.current.max_arg();
  const double da = k.dc.max_abs(), dg = k.dc.max_arg();
  const bool ok = ia <= 5e-4 && ig <= 25e-3 && da <= 5e-4 && dg <= 10e-3 && t_hpf <= 60.0 && t_tds <= 600.0 &&
                  t_hpf < t_tds;
  std::ostringstream d;
  d << "I e_abs " << fmt("%.3g", ia) << " p.u. (<=5e-4), e_arg " << fmt("%.3g", ig * 1e3) << " mrad (<=25); V_dc e_abs "
    << fmt("%.3g", da) << " p.u. (<=5e-4), e_arg " << fmt("%.3g", dg * 1e3) << " mrad (<=10); HPF "
    << fmt("%.2f", t_hpf) << " s, oracle " << fmt("%.2f", t_tds) << " s";
  verdict(1, ok, "single-converter validation", d.str());
}

void benchmark_validation(Shared& sh, const std::string& dir) {
  const Scenario s = load("cigre_lv.json");
  const auto t0 = std::chrono::steady_clock::now();
  const SpectraReport h = run_hpf(s, -1, "hpf");
  const double t_hpf = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  const SpectraReport t = run_tds(s, s.study.tds);
  const double t_tds = seconds_since(t1);
  const KpiReport k = compare_reports(h, t);
  write_pair(dir, "benchmark", h, t, k);
  sh.bench_floor = k.current.max_abs();

  const double va = k.voltage.max_abs(), ia = k.current.max_abs();
  const double arg = std::max(k.voltage.max_arg(), k.current.max_arg());
  const bool ok = va <= 3e-4 && ia <= 6e-4 && arg <= 30e-3 && t_hpf < t_tds;
  std::ostringstream d;
  d << "V e_abs " << fmt("%.3g", va) << " p.u. (<=3e-4), I e_abs " << fmt("%.3g", ia) << " p.u. (<=6e-4), e_arg "
    << fmt("%.3g", arg * 1e3) << " mrad (<=30); HPF " << fmt("%.2f", t_hpf) << " s < oracle " << fmt("%.2f", t_tds)
    << " s";
  verdict(2, ok, "benchmark validation", d.str());
}

void even_dc_harmonics() {
  const Scenario s = load("single_cider_te.json");
  const SpectraReport h = run_hpf(s, -1, "hpf");
  const HarmonicSignal& v = h.dc_voltages.begin()->second;
  double odd = 0.0, even = 0.0;
  for (int k = 1; k <= s.h_max; ++k) {
    const double m = pu_magnitude(v(0, k), k, h.v_base_rms);
    (k % 2 ? odd : even) = std::max(k % 2 ? odd : even, m);
  }
  verdict(3, odd <= 1e-9, "even-only DC-link harmonics",
          "max odd-order |V_dc| " + fmt("%.3g", odd) + " p.u. (<=1e-9), largest even order " + fmt("%.3g", even) + " p.u.");
}

void robustness() {
  const Scenario s = load("cigre_lv.json");
  const NetworkSpec net = s.network();
  auto ciders = s.make_ciders();
  HpfProblem p(net, ciders);
  std::vector<SpectraReport> runs;
  int worst_iter = 0, failed = 0;
  for (int k = 0; k < s.study.robustness_starts; ++k) {
    const HpfUnknowns start = perturbed_start(p, s.study.seed + static_cast<std::uint64_t>(k));
    try {
      const HpfSolution sol = p.solve(s.study.hpf, &start);
      worst_iter = std::max(worst_iter, sol.iterations);
      runs.push_back(make_report("hpf", sol, net));
    } catch (const Error& e) {
      ++failed;
      std::cout << "      start " << k << ": " << e.what() << "\n";
    }
  }
  double spread = 0.0;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) spread = std::max(spread, report_distance(runs[a], runs[b]));
  const bool ok = failed == 0 && worst_iter <= 30 && spread <= 1e-8;
  verdict(4, ok, "convergence robustness",
          std::to_string(runs.size()) + "/" + std::to_string(s.study.robustness_starts) + " converged, max " +
              std::to_string(worst_iter) + " iterations (<=30), pairwise spread " + fmt("%.3g", spread) +
              " p.u. (<=1e-8)");
}

void dc_side_impact(const std::string& dir) {
  const Scenario s = load("cigre_lv.json");
  const SpectraReport with = run_hpf(s, -1, "hpf");
  const SpectraReport without = run_hpf(s, 0, "hpf_no_dc");
  write_text(dir + "/benchmark_hpf_thd.csv", thd_csv(with));
  write_text(dir + "/benchmark_hpf_no_dc_thd.csv", thd_csv(without));

  const std::string sub = s.thevenin.front().node;
  const double a = max_thd_percent(without.currents.at(sub)), b = max_thd_percent(with.currents.at(sub));
  const double factor = b / a;
  bool pattern = true;
  std::ostringstream rows;
  for (const auto& r : s.resources) {
    const double x = max_thd_percent(without.currents.at(r.name)), y = max_thd_percent(with.currents.at(r.name));
    pattern = pattern && y > x;
    rows << " " << r.node << " " << fmt("%.2f", x) << "->" << fmt("%.2f", y);
  }
  for (const auto& l : s.loads) {
    const double x = max_thd_percent(without.currents.at(l.node)), y = max_thd_percent(with.currents.at(l.node));
    pattern = pattern && y < x;
    rows << " " << l.node << " " << fmt("%.2f", x) << "->" << fmt("%.2f", y);
  }
  const bool ok = factor >= 1.4 && factor <= 2.6 && pattern;
  verdict(5, ok, "DC-side impact on THD",
          sub + " current THD " + fmt("%.2f", a) + "% -> " + fmt("%.2f", b) + "% (factor " + fmt("%.3f", factor) +
              ", in [1.4, 2.6]); sign pattern " + (pattern ? "matches" : "differs") + ";" + rows.str());
}

double toeplitz_vs_sampled() {
  std::mt19937_64 g(21);
  std::normal_distribution<double> nd;
  const int hmax = 8, n = 512, ch = 3;
  const HarmonicIndexSet set(50.0, hmax);
  FourierMatrix a(ch, ch);
  for (int h = -2 * hmax; h <= 2 * hmax; ++h)
    for (int i = 0; i < ch * ch; ++i) a.at(h)(i / ch, i % ch) = Complex(nd(g), nd(g));
  HarmonicSignal x(set, ch);
  for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = Complex(nd(g), nd(g));
  const HarmonicSignal y = apply(toeplitz_from_coeffs(a, set), x);
  double err = 0.0, scale = 0.0;
  for (int r = 0; r < ch; ++r) {
    std::vector<Complex> samples(n);
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * kPi * k / n;
      Complex acc = 0.0;
      for (int c = 0; c < ch; ++c) {
        Complex ac = 0.0, xc = 0.0;
        for (const auto& [h, m] : a.coeffs) ac += m(r, c) * std::polar(1.0, h * th);
        for (int h = -hmax; h <= hmax; ++h) xc += x(c, h) * std::polar(1.0, h * th);
        acc += ac * xc;
      }
      samples[k] = acc;
    }
    for (int h = -hmax; h <= hmax; ++h) {
      Complex ref = 0.0;
      for (int k = 0; k < n; ++k) ref += samples[k] * std::polar(1.0, -2.0 * kPi * h * k / n);
      ref /= double(n);
      err = std::max(err, std::abs(ref - y(r, h)));
      scale = std::max(scale, std::abs(ref));
    }
  }
  return err / scale;
}

void property_suite(const Shared& sh) {
  std::ostringstream d;
  bool ok = true;
  auto item = [&](const std::string& name, double v, double lim) {
    const bool pass = v <= lim;
    ok = ok && pass;
    d << (d.tellp() > 0 ? "; " : "") << name << " " << fmt("%.3g", v) << (pass ? " <= " : " > ") << fmt("%.0e", lim);
  };

  item("toeplitz/sampled", toeplitz_vs_sampled(), 1e-10);

  const Scenario bench = load("cigre_lv.json");
  const NetworkSpec net = bench.network();
  const auto names = electrical_nodes(net);
  std::vector<int> keep{static_cast<int>(names.size()) - 1};
  for (const auto& r : bench.resources) keep.push_back(net.node_index(r.node));
  std::vector<int> elim;
  for (int n = 0; n < static_cast<int>(names.size()); ++n)
    if (std::find(keep.begin(), keep.end(), n) == keep.end()) elim.push_back(n);
  double kron = 0.0, hybrid = 0.0;
  std::mt19937_64 g(5);
  std::normal_distribution<double> nd;
  for (int h : {1, 5, 13, 25}) {
    const MatrixXcd y = assemble_admittance(net, bench.f1_hz, h);
    const MatrixXcd yk = kron_reduce(y, keep);
    // direct solve: kept voltages given, eliminated nodes inject nothing
    const Eigen::Index nk = 3 * static_cast<Eigen::Index>(keep.size()), ne = 3 * static_cast<Eigen::Index>(elim.size());
    VectorXcd vk(nk);
    for (Eigen::Index i = 0; i < nk; ++i) vk(i) = Complex(nd(g), nd(g));
    std::vector<int> order;
    for (int n : keep) order.push_back(n);
    for (int n : elim) order.push_back(n);
    MatrixXcd yp(nk + ne, nk + ne);
    for (std::size_t a = 0; a < order.size(); ++a)
      for (std::size_t b = 0; b < order.size(); ++b)
        yp.block(3 * a, 3 * b, 3, 3) = y.block(3 * order[a], 3 * order[b], 3, 3);
    const VectorXcd ve = yp.bottomRightCorner(ne, ne).lu().solve(-yp.bottomLeftCorner(ne, nk) * vk);
    const VectorXcd ik = yp.topLeftCorner(nk, nk) * vk + yp.topRightCorner(nk, ne) * ve;
    kron = std::max(kron, (yk * vk - ik).norm() / ik.norm());

    const HybridEntry e = hybrid_from_admittance(yk, 1);
    const VectorXcd i = yk * vk;
    const VectorXcd vs = e.ss * i.head(3) + e.sr * vk.tail(nk - 3);
    const VectorXcd ir = e.rs * i.head(3) + e.rr * vk.tail(nk - 3);
    hybrid = std::max(hybrid, std::max((vs - vk.head(3)).norm() / vk.norm(), (ir - i.tail(nk - 3)).norm() / i.norm()));
  }
  item("kron/direct", kron, 1e-12);
  item("hybrid round trip", hybrid, 1e-10);

  {
    Scenario small = bench;
    small.h_max = 5;
    const NetworkSpec n5 = small.network();
    auto ciders = small.make_ciders();
    HpfProblem p(n5, ciders);
    const HpfUnknowns u = perturbed_start(p, 11, 0.05);
    p.update_operating_points(u);
    const MatrixXcd ja = p.jacobian(u), jf = p.jacobian_fd(u, 1e-3);
    item("jacobian/central differences", (ja - jf).norm() / ja.norm(), 1e-6);
  }

  const Scenario s = load("single_cider_te.json");
  const SpectraReport coarse = sh.single_tds.currents.empty() ? run_tds(s, s.study.tds) : sh.single_tds;
  const SpectraReport h = run_hpf(bench, -1, "hpf");
  item("conjugate symmetry (HPF)", report_asymmetry(h), 1e-10);
  item("conjugate symmetry (oracle)", report_asymmetry(coarse), 1e-12);

  TdsOptions fine = s.study.tds;
  fine.samples_per_period *= 2;
  const SpectraReport t2 = run_tds(s, fine);
  item("RK4 step-halving drift", report_distance(coarse, t2), 1e-8);

  verdict(6, ok, "property suite", d.str());
}

void dhpf_divergence(const Shared& sh, const std::string& dir) {
  const Scenario s = load("cigre_lv.json");
  const NetworkSpec net = s.network();
  const RatioSettings& rs = s.study.ratios;
  Setpoints rated;
  rated.p_w = rs.rated_power_w;
  rated.q_var = rs.rated_power_w * std::tan(std::acos(rs.power_factor));
  const ResourceSpec& ref = s.resources.front();
  rated.v_dc = ref.setpoints.v_dc;
  const AlphaRatios a = compute_alpha_ratios(ref.params, rated, rs.thevenin, ref.dc_side, s.index_set(), s.study.hpf);
  auto ciders = s.make_ciders();
  const HpfSolution d = solve_dhpf(net, ciders, std::vector<AlphaRatios>(ciders.size(), a), s.study.hpf);
  const SpectraReport rd = make_report("dhpf", d, net);
  const SpectraReport rh = run_hpf(s, -1, "hpf");
  const KpiReport k = compare_reports(rd, rh);
  write_pair(dir, "dhpf_vs_hpf", rd, rh, k);

  const double floor = sh.bench_floor > 0.0 ? sh.bench_floor : 6e-4;
  int orders = 0;
  std::ostringstream big;
  for (const auto& e : k.current.per_h)
    if (e.h >= 1 && e.e_abs > 10.0 * floor) {
      ++orders;
      big << " h" << e.h << "=" << fmt("%.3g", e.e_abs);
    }
  verdict(7, orders >= 3, "decoupled vs coupled flow",
          std::to_string(orders) + " orders with current difference > 10 x floor " + fmt("%.3g", floor) +
              " p.u. (need >= 3):" + big.str() + "; report " + dir + "/dhpf_vs_hpf_kpi.json");
}

template <class F>
void guarded(int id, const std::string& title, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    verdict(id, false, title, std::string("aborted: ") + e.what());
  }
}

}  // namespace

int main() {
  const std::string dir = out_dir();
  Shared sh;
  guarded(1, "single-converter validation", [&] { single_validation(sh, dir); });
  guarded(2, "benchmark validation", [&] { benchmark_validation(sh, dir); });
  guarded(3, "even-only DC-link harmonics", [&] { even_dc_harmonics(); });
  guarded(4, "convergence robustness", [&] { robustness(); });
  guarded(5, "DC-side impact on THD", [&] { dc_side_impact(dir); });
  guarded(6, "property suite", [&] { property_suite(sh); });
  guarded(7, "decoupled vs coupled flow", [&] { dhpf_divergence(sh, dir); });
  std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
