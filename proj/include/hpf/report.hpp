#pragma once

// On-disk artifacts: spectra JSON keyed by (node, phase, h), THD CSV,
// waveform CSV, KPI reports and static SVG plots.

#include <map>
#include <string>
#include <vector>

#include "hpf/oracle.hpp"
#include "hpf/solver.hpp"

namespace hpf {

using SpectrumMap = std::map<std::string, HarmonicSignal>;

struct SpectraReport {
  std::string study;
  double seconds = 0.0;
  int iterations = -1;  // -1 when not iterative
  bool converged = true;
  std::vector<double> residual_trace;
  double v_base_rms = 230.0, i_base_rms = 0.0;
  SpectrumMap voltages, currents, dc_voltages;
};

SpectraReport make_report(const std::string& study, const HpfSolution& sol, const NetworkSpec& net);
SpectraReport make_report(const std::string& study, const TdsResult& res, const NetworkSpec& net);

// Errors of `a` against the reference `b`, per harmonic as maxima over the
// listed nodes and phases, plus per-node maxima.
struct KpiGroup {
  std::vector<KpiEntry> per_h;
  std::map<std::string, double> node_max_abs;
  double max_abs() const { return max_abs_error(per_h); }
  double max_arg() const { return max_arg_error(per_h); }
};

struct KpiReport {
  std::string subject, reference;
  KpiGroup voltage, current, dc;
};

KpiGroup compare_maps(const SpectrumMap& a, const SpectrumMap& b, double base, double arg_floor_pu = 1e-3,
                      const std::vector<std::string>& only = {});
KpiReport compare_reports(const SpectraReport& a, const SpectraReport& b, double arg_floor_pu = 1e-3);

// THD_max over phases per node; NaN for vanishing fundamentals.
struct ThdRow {
  std::string node, quantity;
  double thd_max_percent;
};
std::vector<ThdRow> thd_table(const SpectraReport& r);

std::string spectra_json(const SpectraReport& r);
std::string thd_csv(const SpectraReport& r);
std::string waveforms_csv(const Waveforms& w);
std::string kpi_json(const KpiReport& k);
// Magnitude stems of two spectra of one channel, in p.u.
std::string spectrum_svg(const std::string& title, const HarmonicSignal& a, const HarmonicSignal& b, int channel,
                         double base, const std::string& label_a, const std::string& label_b);
// Per-harmonic absolute errors of a KPI group (log scale).
std::string error_svg(const std::string& title, const KpiGroup& g);

void write_text(const std::string& path, const std::string& content);

}  // namespace hpf
