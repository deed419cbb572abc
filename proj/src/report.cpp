#include "hpf/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hpf/error.hpp"
#include "json.hpp"

namespace hpf {

using Json = nlohmann::ordered_json;

namespace {

SpectrumMap only_nodes(const SpectrumMap& m, const std::vector<std::string>& nodes) {
  SpectrumMap out;
  for (const auto& n : nodes)
    if (auto it = m.find(n); it != m.end()) out.emplace(n, it->second);
  return out;
}

Json spectrum_json(const HarmonicSignal& s) {
  static const char* kPhase[] = {"a", "b", "c"};
  Json out = Json::object();
  for (int c = 0; c < s.channels(); ++c) {
    Json ph = Json::object();
    for (int h = 0; h <= s.index_set().h_max(); ++h) ph[std::to_string(h)] = Json::array({s(c, h).real(), s(c, h).imag()});
    out[s.channels() == 3 ? kPhase[c] : std::to_string(c)] = ph;
  }
  return out;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json group_json(const KpiGroup& g) {
  Json j;
  j["max_e_abs_pu"] = g.max_abs();
  j["max_e_arg_rad"] = g.max_arg();
  j["per_h"] = Json::array();
  for (const auto& e : g.per_h)
    j["per_h"].push_back(Json{{"h", e.h}, {"e_abs_pu", e.e_abs}, {"e_arg_rad", number_or_null(e.e_arg)}});
  j["node_max_e_abs_pu"] = Json::object();
  for (const auto& [n, v] : g.node_max_abs) j["node_max_e_abs_pu"][n] = v;
  return j;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream o;
  o << std::setprecision(prec) << x;
  return o.str();
}

}  // namespace

SpectraReport make_report(const std::string& study, const HpfSolution& sol, const NetworkSpec& net) {
  SpectraReport r;
  r.study = study;
  r.seconds = sol.seconds;
  r.iterations = sol.iterations;
  r.converged = sol.converged;
  r.residual_trace = sol.residual_trace;
  r.v_base_rms = net.v_base_rms;
  r.i_base_rms = net.i_base_rms();
  r.voltages = only_nodes(sol.node_voltages, net.nodes);
  r.currents = sol.node_currents;
  r.dc_voltages = sol.dc_voltages;
  return r;
}

SpectraReport make_report(const std::string& study, const TdsResult& res, const NetworkSpec& net) {
  SpectraReport r;
  r.study = study;
  r.seconds = res.seconds;
  r.converged = res.settled;
  r.v_base_rms = net.v_base_rms;
  r.i_base_rms = net.i_base_rms();
  r.voltages = res.node_voltages;
  r.currents = res.node_currents;
  r.dc_voltages = res.dc_voltages;
  return r;
}

KpiGroup compare_maps(const SpectrumMap& a, const SpectrumMap& b, double base, double arg_floor_pu,
                      const std::vector<std::string>& only) {
  KpiGroup g;
  for (const auto& [name, sa] : a) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    auto it = b.find(name);
    if (it == b.end()) continue;
    const auto k = compare_spectra(sa, it->second, base, arg_floor_pu);
    g.node_max_abs[name] = max_abs_error(k);
    if (g.per_h.empty()) {
      g.per_h = k;
      continue;
    }
    for (std::size_t i = 0; i < k.size() && i < g.per_h.size(); ++i) {
      g.per_h[i].e_abs = std::max(g.per_h[i].e_abs, k[i].e_abs);
      if (std::isnan(g.per_h[i].e_arg)) g.per_h[i].e_arg = k[i].e_arg;
      else if (!std::isnan(k[i].e_arg)) g.per_h[i].e_arg = std::max(g.per_h[i].e_arg, k[i].e_arg);
    }
  }
  return g;
}

KpiReport compare_reports(const SpectraReport& a, const SpectraReport& b, double arg_floor_pu) {
  KpiReport k;
  k.subject = a.study;
  k.reference = b.study;
  k.voltage = compare_maps(a.voltages, b.voltages, a.v_base_rms, arg_floor_pu);
  k.current = compare_maps(a.currents, b.currents, a.i_base_rms, arg_floor_pu);
  k.dc = compare_maps(a.dc_voltages, b.dc_voltages, a.v_base_rms, arg_floor_pu);
  return k;
}

std::vector<ThdRow> thd_table(const SpectraReport& r) {
  std::vector<ThdRow> out;
  for (const auto& [n, s] : r.voltages) out.push_back({n, "voltage", max_thd_percent(s)});
  for (const auto& [n, s] : r.currents) out.push_back({n, "current", max_thd_percent(s)});
  return out;
}

std::string spectra_json(const SpectraReport& r) {
  Json j;
  j["study"] = r.study;
  j["seconds"] = r.seconds;
  if (r.iterations >= 0) j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  if (!r.residual_trace.empty()) j["residual_trace_pu"] = r.residual_trace;
  j["v_base_rms_v"] = r.v_base_rms;
  j["i_base_rms_a"] = r.i_base_rms;
  j["format"] = "complex Fourier coefficients [re, im] of x(t) = sum_h X_h exp(j h w1 t), h >= 0";
  auto block = [](const SpectrumMap& m) {
    Json o = Json::object();
    for (const auto& [n, s] : m) o[n] = spectrum_json(s);
    return o;
  };
  j["voltages"] = block(r.voltages);
  j["currents"] = block(r.currents);
  j["dc_voltages"] = block(r.dc_voltages);
  return j.dump(2) + "\n";
}

std::string thd_csv(const SpectraReport& r) {
  std::ostringstream o;
  o << "node,quantity,thd_max_percent\n" << std::setprecision(10);
  for (const auto& row : thd_table(r)) {
    o << row.node << ',' << row.quantity << ',';
    if (std::isnan(row.thd_max_percent)) o << "undefined";
    else o << row.thd_max_percent;
    o << '\n';
  }
  return o.str();
}

std::string waveforms_csv(const Waveforms& w) {
  std::ostringstream o;
  o << "t_s";
  for (const auto& c : w.channels) o << ',' << c;
  o << '\n' << std::setprecision(12);
  for (Eigen::Index r = 0; r < w.values.rows(); ++r) {
    o << w.time[r];
    for (Eigen::Index c = 0; c < w.values.cols(); ++c) o << ',' << w.values(r, c);
    o << '\n';
  }
  return o.str();
}

std::string kpi_json(const KpiReport& k) {
  Json j;
  j["subject"] = k.subject;
  j["reference"] = k.reference;
  j["voltage"] = group_json(k.voltage);
  j["current"] = group_json(k.current);
  j["dc_voltage"] = group_json(k.dc);
  return j.dump(2) + "\n";
}

std::string spectrum_svg(const std::string& title, const HarmonicSignal& a, const HarmonicSignal& b, int channel,
                         double base, const std::string& label_a, const std::string& label_b) {
  const int hm = std::min(a.index_set().h_max(), b.index_set().h_max());
  const double w = 760, h = 320, left = 60, right = 20, top = 40, bottom = 40;
  double vmax = 0.0;
  for (int k = 0; k <= hm; ++k)
    vmax = std::max({vmax, pu_magnitude(a(channel, k), k, base), pu_magnitude(b(channel, k), k, base)});
  if (vmax <= 0.0) vmax = 1.0;
  // log axis from 1e-6 p.u. so that both the fundamental and small harmonics show
  const double lo = std::log10(1e-6), hi = std::log10(vmax) + 0.2;
  auto y = [&](double v) { return top + (h - top - bottom) * (1.0 - (std::log10(std::max(v, 1e-6)) - lo) / (hi - lo)); };
  const double dx = (w - left - right) / (hm + 1);
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">" << title << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  for (int e = -6; e <= static_cast<int>(std::floor(hi)); ++e)
    o << "<text x=\"5\" y=\"" << y(std::pow(10.0, e)) + 4 << "\">1e" << e << "</text>\n";
  for (int k = 0; k <= hm; ++k) {
    const double xa = left + dx * k + dx * 0.3, xb = left + dx * k + dx * 0.6;
    o << "<line x1=\"" << xa << "\" y1=\"" << h - bottom << "\" x2=\"" << xa << "\" y2=\"" << y(pu_magnitude(a(channel, k), k, base))
      << "\" stroke=\"#1f77b4\" stroke-width=\"3\"/>\n";
    o << "<line x1=\"" << xb << "\" y1=\"" << h - bottom << "\" x2=\"" << xb << "\" y2=\"" << y(pu_magnitude(b(channel, k), k, base))
      << "\" stroke=\"#d62728\" stroke-width=\"3\"/>\n";
    if (k % 5 == 0) o << "<text x=\"" << xa << "\" y=\"" << h - bottom + 15 << "\">" << k << "</text>\n";
  }
  o << "<text x=\"" << w - 200 << "\" y=\"20\" fill=\"#1f77b4\">" << label_a << "</text>\n";
  o << "<text x=\"" << w - 110 << "\" y=\"20\" fill=\"#d62728\">" << label_b << "</text>\n";
  o << "<text x=\"" << (w / 2) << "\" y=\"" << h - 8 << "\">harmonic order (magnitude in p.u.)</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string error_svg(const std::string& title, const KpiGroup& g) {
  const double w = 760, h = 300, left = 60, right = 20, top = 40, bottom = 40;
  const double lo = -12, hi = -1;
  auto y = [&](double v) {
    const double l = std::clamp(std::log10(std::max(v, 1e-12)), lo, hi);
    return top + (h - top - bottom) * (1.0 - (l - lo) / (hi - lo));
  };
  const double dx = (w - left - right) / std::max<std::size_t>(g.per_h.size(), 1);
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">" << title << " (max e_abs " << fmt(g.max_abs()) << " p.u.)</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom << "\" stroke=\"black\"/>\n";
  for (int e = -12; e <= -2; e += 2) o << "<text x=\"5\" y=\"" << y(std::pow(10.0, e)) + 4 << "\">1e" << e << "</text>\n";
  for (std::size_t i = 0; i < g.per_h.size(); ++i) {
    const double x = left + dx * i + dx * 0.2;
    o << "<rect x=\"" << x << "\" y=\"" << y(g.per_h[i].e_abs) << "\" width=\"" << dx * 0.6 << "\" height=\""
      << h - bottom - y(g.per_h[i].e_abs) << "\" fill=\"#555\"/>\n";
    if (g.per_h[i].h % 5 == 0) o << "<text x=\"" << x << "\" y=\"" << h - bottom + 15 << "\">" << g.per_h[i].h << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
}

}  // namespace hpf
