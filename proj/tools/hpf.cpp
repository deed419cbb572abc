// Command-line front end: run studies on a scenario file and write artifacts.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hpf/error.hpp"
#include "hpf/report.hpp"
#include "hpf/scenario.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace hpf;

namespace {

struct Overrides {
  std::optional<int> h_max;
  std::optional<double> epsilon;
  std::optional<int> max_iter;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

Scenario prepare(const std::string& path, const Overrides& o) {
  Scenario s = load_scenario(path);
  if (o.h_max) {
    if (*o.h_max < 1) throw Error(ErrorKind::Schema, "--h-max must be at least 1");
    s.h_max = *o.h_max;
  }
  if (o.epsilon) s.study.hpf.epsilon = *o.epsilon;
  if (o.max_iter) s.study.hpf.max_iter = *o.max_iter;
  if (o.seed) s.study.seed = *o.seed;
  // --out wins over the environment, which wins over the scenario.
  if (o.out) s.study.output_dir = *o.out;
  else if (const char* env = std::getenv("HPF_OUT_DIR"); env && *env) s.study.output_dir = env;
  fs::create_directories(s.study.output_dir);
  return s;
}

std::string out_path(const Scenario& s, const std::string& file) { return (fs::path(s.study.output_dir) / file).string(); }

void emit(const Scenario& s, const SpectraReport& r) {
  write_text(out_path(s, r.study + "_spectra.json"), spectra_json(r));
  write_text(out_path(s, r.study + "_thd.csv"), thd_csv(r));
  std::cout << r.study << ": " << (r.iterations >= 0 ? std::to_string(r.iterations) + " iterations, " : "")
            << r.seconds << " s -> " << out_path(s, r.study + "_spectra.json") << "\n";
}

SpectraReport hpf_study(const Scenario& s, int dc, const std::string& name, bool perturb) {
  const NetworkSpec net = s.network();
  std::vector<GridFollowingCider> ciders = s.make_ciders(dc);
  HpfProblem problem(net, ciders);
  HpfSolution sol;
  if (perturb) {
    const HpfUnknowns start = perturbed_start(problem, s.study.seed);
    sol = problem.solve(s.study.hpf, &start);
  } else {
    sol = problem.solve(s.study.hpf);
  }
  return make_report(name, sol, net);
}

AlphaRatios ratios_for(const Scenario& s) {
  const RatioSettings& r = s.study.ratios;
  Setpoints sp;
  sp.p_w = r.rated_power_w;
  sp.q_var = r.rated_power_w * std::tan(std::acos(r.power_factor));
  const CiderParams params = s.resources.empty() ? CiderParams{} : s.resources.front().params;
  const bool dc = s.resources.empty() ? true : s.resources.front().dc_side;
  return compute_alpha_ratios(params, sp, r.thevenin, dc, s.index_set(), s.study.hpf);
}

void write_plots(const Scenario& s, const SpectraReport& a, const SpectraReport& b, const KpiReport& k,
                 const std::string& prefix) {
  for (const auto& [name, sa] : a.currents)
    if (auto it = b.currents.find(name); it != b.currents.end())
      write_text(out_path(s, prefix + "_current_" + name + ".svg"),
                 spectrum_svg("current " + name + " phase a", sa, it->second, 0, a.i_base_rms, a.study, b.study));
  for (const auto& [name, sa] : a.voltages)
    if (auto it = b.voltages.find(name); it != b.voltages.end())
      write_text(out_path(s, prefix + "_voltage_" + name + ".svg"),
                 spectrum_svg("voltage " + name + " phase a", sa, it->second, 0, a.v_base_rms, a.study, b.study));
  write_text(out_path(s, prefix + "_errors_voltage.svg"), error_svg("voltage errors", k.voltage));
  write_text(out_path(s, prefix + "_errors_current.svg"), error_svg("current errors", k.current));
}

void print_kpis(const KpiReport& k) {
  std::cout << k.subject << " vs " << k.reference << ": max e_abs V " << k.voltage.max_abs() << " p.u., I "
            << k.current.max_abs() << " p.u., V_dc " << k.dc.max_abs() << " p.u.; max e_arg V " << k.voltage.max_arg()
            << " rad, I " << k.current.max_arg() << " rad\n";
}

SpectraReport tds_study(const Scenario& s) {
  const NetworkSpec net = s.network();
  TimeDomainSimulator sim(net, s.make_tds_ciders(), s.f1_hz);
  const TdsResult res = sim.run(s.study.tds, s.index_set());
  if (!res.settled)
    std::cerr << "warning: time-domain run did not settle (last period change " << res.final_period_change_pu
              << " p.u.)\n";
  write_text(out_path(s, "tds_waveforms.csv"), waveforms_csv(res.waveforms));
  return make_report("tds", res, net);
}

int run_mode(const std::string& mode, const std::string& path, const Overrides& o) {
  const Scenario s = prepare(path, o);
  const bool perturb = o.seed.has_value();
  if (mode == "hpf") {
    emit(s, hpf_study(s, -1, "hpf", perturb));
  } else if (mode == "hpf_no_dc") {
    emit(s, hpf_study(s, 0, "hpf_no_dc", perturb));
  } else if (mode == "dhpf") {
    const NetworkSpec net = s.network();
    const AlphaRatios a = ratios_for(s);
    std::vector<GridFollowingCider> ciders = s.make_ciders();
    const HpfSolution d = solve_dhpf(net, ciders, std::vector<AlphaRatios>(ciders.size(), a), s.study.hpf);
    const SpectraReport rd = make_report("dhpf", d, net);
    emit(s, rd);
    const SpectraReport rh = hpf_study(s, -1, "hpf", perturb);
    emit(s, rh);
    const KpiReport k = compare_reports(rd, rh);
    write_text(out_path(s, "dhpf_vs_hpf.json"), kpi_json(k));
    write_plots(s, rd, rh, k, "dhpf_vs_hpf");
    print_kpis(k);
  } else if (mode == "tds") {
    emit(s, tds_study(s));
  } else if (mode == "validate") {
    const SpectraReport rh = hpf_study(s, -1, "hpf", perturb);
    emit(s, rh);
    const SpectraReport rt = tds_study(s);
    emit(s, rt);
    const KpiReport k = compare_reports(rh, rt);
    write_text(out_path(s, "kpi.json"), kpi_json(k));
    write_plots(s, rh, rt, k, "hpf_vs_tds");
    print_kpis(k);
  } else {
    throw Error(ErrorKind::Schema, "unknown mode '" + mode + "'");
  }
  return 0;
}

int run_ratios(const std::string& path, const Overrides& o) {
  const Scenario s = prepare(path, o);
  const AlphaRatios a = ratios_for(s);
  nlohmann::ordered_json j;
  j["rated_power_w"] = s.study.ratios.rated_power_w;
  j["power_factor"] = s.study.ratios.power_factor;
  static const char* kPhase[] = {"a", "b", "c"};
  for (int p = 0; p < 3; ++p)
    for (int h = 0; h <= s.h_max; ++h)
      j["alpha"][kPhase[p]][std::to_string(h)] = {a.alpha(p, h).real(), a.alpha(p, h).imag()};
  write_text(out_path(s, "ratios.json"), j.dump(2) + "\n");
  std::cout << "ratios -> " << out_path(s, "ratios.json") << "\n";
  return 0;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--h-max", o.h_max, "highest harmonic order");
  cmd->add_option("--epsilon", o.epsilon, "Newton-Raphson tolerance in p.u.");
  cmd->add_option("--max-iter", o.max_iter, "Newton-Raphson iteration limit");
  cmd->add_option("--out", o.out, "output directory (overrides HPF_OUT_DIR and the scenario)");
  cmd->add_option("--seed", o.seed, "start from a randomly perturbed initial point");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic power flow with converter DC-side dynamics"};
  app.require_subcommand(1);
  Overrides o;
  std::string mode, scenario;

  auto* run = app.add_subcommand("run", "run one study mode");
  run->add_option("mode", mode, "hpf | hpf_no_dc | dhpf | tds | validate")
      ->required()
      ->check(CLI::IsMember({"hpf", "hpf_no_dc", "dhpf", "tds", "validate"}));
  run->add_option("scenario", scenario, "scenario JSON file")->required();
  add_common(run, o);

  auto* validate = app.add_subcommand("validate", "HPF against the time-domain reference");
  validate->add_option("scenario", scenario, "scenario JSON file")->required();
  add_common(validate, o);

  auto* ratios = app.add_subcommand("ratios", "harmonic current ratios of a converter at rated power");
  ratios->add_option("scenario", scenario, "scenario JSON file")->required();
  add_common(ratios, o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_mode(mode, scenario, o);
    if (*validate) return run_mode("validate", scenario, o);
    if (*ratios) return run_ratios(scenario, o);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
