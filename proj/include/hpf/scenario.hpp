#pragma once

// Scenario files: one JSON document with the index set, the network, the
// resources and the study settings.  Unknown keys are rejected and every
// schema error names the file line and JSON path it refers to.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hpf/cider.hpp"
#include "hpf/network.hpp"
#include "hpf/oracle.hpp"
#include "hpf/solver.hpp"

namespace hpf {

struct LineType {
  double r_pos_ohm_per_km = 0.0, r_zero_ohm_per_km = 0.0;
  double l_pos_h_per_km = 0.0, l_zero_h_per_km = 0.0;
  double c_pos_f_per_km = 0.0, c_zero_f_per_km = 0.0;
};

struct LineEntry {
  std::string from, to, type;
  double length_m = 0.0;
};

struct ResourceSpec {
  std::string name;
  std::string node;
  bool dc_side = true;
  CiderParams params;
  Setpoints setpoints;
};

// Converter at rated power behind a Thevenin equivalent, used to derive the
// harmonic current ratios of the decoupled study.
struct RatioSettings {
  double rated_power_w = 57e3;
  double power_factor = 0.95;
  TheveninSpec thevenin;
};

struct StudySettings {
  std::string mode = "hpf";
  HpfOptions hpf;
  TdsOptions tds;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int robustness_starts = 20;
  RatioSettings ratios;
};

struct Scenario {
  std::string name;
  double f1_hz = 50.0;
  int h_max = 25;
  double v_base_rms_v = 230.0;
  double p_base_w = 50e3;
  std::vector<std::string> nodes;
  std::map<std::string, LineType> line_types;
  std::vector<LineEntry> lines;
  std::vector<LoadSpec> loads;
  std::vector<TheveninSpec> thevenin;
  std::vector<ResourceSpec> resources;
  StudySettings study;

  HarmonicIndexSet index_set() const { return HarmonicIndexSet(f1_hz, h_max); }
  NetworkSpec network() const;
  // dc_side overrides every resource when given (0 = AC-only, 1 = with DC).
  std::vector<GridFollowingCider> make_ciders(int dc_side = -1) const;
  std::vector<TdsCider> make_tds_ciders(int dc_side = -1) const;
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);
// Canonical form: every field explicit, fixed key order, 2-space indent.
std::string dump_scenario(const Scenario& s);

}  // namespace hpf
