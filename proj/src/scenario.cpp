#include "hpf/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "hpf/error.hpp"
#include "json.hpp"

namespace hpf {

using Json = nlohmann::ordered_json;

namespace {

// Maps JSON pointers to the 1-based line where the value starts.  nlohmann
// does not keep source positions, so a second light pass over the text
// records them.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : s_(text) {
    skip();
    value("");
  }
  int line(std::string ptr) const {
    for (;;) {
      auto it = lines_.find(ptr);
      if (it != lines_.end()) return it->second;
      if (ptr.empty()) return 1;
      ptr.erase(ptr.rfind('/'));
    }
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++ln_;
      ++i_;
    }
  }
  std::string string() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    ++i_;
    return out;
  }
  static std::string escape(const std::string& k) {
    std::string out;
    for (char c : k) out += c == '~' ? "~0" : c == '/' ? "~1" : std::string(1, c);
    return out;
  }
  void value(const std::string& ptr) {
    lines_.emplace(ptr, ln_);
    if (i_ >= s_.size()) return;
    if (s_[i_] == '{') {
      ++i_;
      skip();
      while (i_ < s_.size() && s_[i_] != '}') {
        const std::string key = string();
        skip();
        ++i_;  // ':'
        skip();
        value(ptr + "/" + escape(key));
        skip();
        if (i_ < s_.size() && s_[i_] == ',') ++i_, skip();
      }
      ++i_;
    } else if (s_[i_] == '[') {
      ++i_;
      skip();
      for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(ptr + "/" + std::to_string(k));
        skip();
        if (i_ < s_.size() && s_[i_] == ',') ++i_, skip();
      }
      ++i_;
    } else if (s_[i_] == '"') {
      string();
    } else {
      while (i_ < s_.size() && !std::strchr(",]} \t\r\n", s_[i_])) ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int ln_ = 1;
  std::map<std::string, int> lines_;
};

struct Ctx {
  std::string source;
  const LineIndex* index;
  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    throw Error(ErrorKind::Schema, source + ":" + std::to_string(index->line(ptr)) + ": " +
                                       (ptr.empty() ? "/" : ptr) + ": " + msg);
  }
};

// Typed view of one JSON object; remembers which keys were consumed so the
// rest can be rejected.
class Obj {
 public:
  Obj(const Ctx& ctx, const Json& j, std::string ptr) : ctx_(ctx), j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) ctx_.fail(ptr_, "expected an object");
  }
  ~Obj() noexcept(false) {
    if (std::uncaught_exceptions() == 0) finish();
  }
  void finish() {
    if (done_) return;
    done_ = true;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) ctx_.fail(ptr_ + "/" + it.key(), "unknown key '" + it.key() + "'");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  const Json& raw(const std::string& k, bool required = true) {
    used_.insert(k);
    if (!j_.contains(k)) {
      if (required) ctx_.fail(ptr_, "missing key '" + k + "'");
      static const Json null;
      return null;
    }
    return j_.at(k);
  }
  std::string path(const std::string& k) const { return ptr_ + "/" + k; }
  const Ctx& ctx() const { return ctx_; }

  double num(const std::string& k) {
    const Json& v = raw(k);
    if (!v.is_number()) ctx_.fail(path(k), "expected a number");
    return v.get<double>();
  }
  double num(const std::string& k, double def) { return has(k) ? num(k) : (used_.insert(k), def); }
  double positive(const std::string& k, double def) {
    const double v = num(k, def);
    if (!(v > 0.0)) ctx_.fail(path(k), "must be positive");
    return v;
  }
  double non_negative(const std::string& k, double def) {
    const double v = num(k, def);
    if (!(v >= 0.0)) ctx_.fail(path(k), "must be non-negative");
    return v;
  }
  long integer(const std::string& k, long def, long lo) {
    if (!has(k)) return used_.insert(k), def;
    const Json& v = raw(k);
    if (!v.is_number_integer()) ctx_.fail(path(k), "expected an integer");
    const long x = v.get<long>();
    if (x < lo) ctx_.fail(path(k), "must be at least " + std::to_string(lo));
    return x;
  }
  std::string str(const std::string& k) {
    const Json& v = raw(k);
    if (!v.is_string() || v.get<std::string>().empty()) ctx_.fail(path(k), "expected a non-empty string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) { return has(k) ? str(k) : (used_.insert(k), def); }
  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return used_.insert(k), def;
    const Json& v = raw(k);
    if (!v.is_boolean()) ctx_.fail(path(k), "expected true or false");
    return v.get<bool>();
  }
  const Json& array(const std::string& k, bool required = true) {
    const Json& v = raw(k, required);
    if (!required && v.is_null()) return v;
    if (!v.is_array()) ctx_.fail(path(k), "expected an array");
    return v;
  }

 private:
  const Ctx& ctx_;
  const Json& j_;
  std::string ptr_;
  std::set<std::string> used_;
  bool done_ = false;
};

const std::set<std::string> kModes{"hpf", "hpf_no_dc", "dhpf", "tds", "validate"};

StageGains read_stage(Obj& parent, const std::string& key, const StageGains& def) {
  if (!parent.has(key)) {
    parent.raw(key, false);
    return def;
  }
  Obj o(parent.ctx(), parent.raw(key), parent.path(key));
  StageGains g;
  g.k_fb = o.num("k_fb", def.k_fb);
  g.t_fb = o.positive("t_fb_s", def.t_fb);
  g.k_ft = o.num("k_ft", def.k_ft);
  if (o.has("k_ff")) {
    if (o.raw("k_ff").is_null()) g.k_ff.reset();
    else g.k_ff = o.num("k_ff");
  } else {
    o.raw("k_ff", false);
    g.k_ff = def.k_ff;
  }
  return g;
}

CiderParams read_params(Obj& parent) {
  CiderParams d;
  if (!parent.has("params")) {
    parent.raw("params", false);
    return d;
  }
  Obj o(parent.ctx(), parent.raw("params"), parent.path("params"));
  CiderParams p;
  p.l_alpha = o.positive("l_alpha_h", d.l_alpha);
  p.r_alpha = o.non_negative("r_alpha_ohm", d.r_alpha);
  p.c_phi = o.positive("c_phi_f", d.c_phi);
  p.g_phi = o.non_negative("g_phi_s", d.g_phi);
  p.l_gamma = o.positive("l_gamma_h", d.l_gamma);
  p.r_gamma = o.non_negative("r_gamma_ohm", d.r_gamma);
  p.c_delta = o.positive("c_delta_f", d.c_delta);
  p.g_delta = o.non_negative("g_delta_s", d.g_delta);
  p.rated_va = o.positive("rated_va", d.rated_va);
  p.alpha = read_stage(o, "alpha", d.alpha);
  p.phi = read_stage(o, "phi", d.phi);
  p.gamma = read_stage(o, "gamma", d.gamma);
  p.delta = read_stage(o, "delta", d.delta);
  return p;
}

TheveninSpec read_thevenin(const Ctx& ctx, const Json& j, const std::string& ptr, bool need_node) {
  Obj o(ctx, j, ptr);
  TheveninSpec t;
  t.node = need_node ? o.str("node") : o.str("node", "PCC");
  t.v_nominal_rms = o.positive("v_nominal_rms_v", 230.0);
  t.z_abs_ohm = o.positive("z_abs_ohm", 0.0);
  t.r_over_x = o.positive("r_over_x", 1.0);
  const Json& hs = o.array("harmonics");
  t.harmonics.clear();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const std::string hp = o.path("harmonics") + "/" + std::to_string(k);
    Obj h(ctx, hs[k], hp);
    if (!h.has("h")) ctx.fail(hp, "missing key 'h'");
    const int order = static_cast<int>(h.integer("h", 0, 1));
    if (t.harmonics.count(order)) ctx.fail(hp + "/h", "duplicate harmonic order");
    t.harmonics[order] = {h.non_negative("magnitude_pu", 0.0), h.num("angle_rad", 0.0)};
  }
  if (!t.harmonics.count(1)) ctx.fail(o.path("harmonics"), "the fundamental (h = 1) is required");
  return t;
}

Json stage_json(const StageGains& g) {
  Json j;
  j["k_fb"] = g.k_fb;
  j["t_fb_s"] = g.t_fb;
  j["k_ft"] = g.k_ft;
  j["k_ff"] = g.k_ff ? Json(*g.k_ff) : Json(nullptr);
  return j;
}

Json thevenin_json(const TheveninSpec& t) {
  Json j;
  j["node"] = t.node;
  j["v_nominal_rms_v"] = t.v_nominal_rms;
  j["z_abs_ohm"] = t.z_abs_ohm;
  j["r_over_x"] = t.r_over_x;
  j["harmonics"] = Json::array();
  for (const auto& [h, mp] : t.harmonics)
    j["harmonics"].push_back(Json{{"h", h}, {"magnitude_pu", mp.first}, {"angle_rad", mp.second}});
  return j;
}

}  // namespace

NetworkSpec Scenario::network() const {
  NetworkSpec n;
  n.nodes = nodes;
  n.v_base_rms = v_base_rms_v;
  n.p_base_w = p_base_w;
  for (const auto& l : lines) {
    const LineType& t = line_types.at(l.type);
    n.lines.push_back(LineSpec{l.from, l.to, l.length_m, t.r_pos_ohm_per_km, t.r_zero_ohm_per_km, t.l_pos_h_per_km,
                               t.l_zero_h_per_km, t.c_pos_f_per_km, t.c_zero_f_per_km});
  }
  n.loads = loads;
  n.sources = thevenin;
  return n;
}

std::vector<GridFollowingCider> Scenario::make_ciders(int dc_side) const {
  std::vector<GridFollowingCider> out;
  const HarmonicIndexSet set = index_set();
  for (const auto& r : resources)
    out.emplace_back(r.name, r.node, r.params, r.setpoints, dc_side < 0 ? r.dc_side : dc_side == 1, set, v_base_rms_v);
  return out;
}

std::vector<TdsCider> Scenario::make_tds_ciders(int dc_side) const {
  std::vector<TdsCider> out;
  for (const auto& r : resources)
    out.push_back(TdsCider{r.name, r.node, r.params, r.setpoints, dc_side < 0 ? r.dc_side : dc_side == 1});
  return out;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Byte offset to line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw Error(ErrorKind::Schema, source + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const LineIndex index(text);
  const Ctx ctx{source, &index};
  Scenario s;
  Obj top(ctx, root, "");
  s.name = top.str("name", "scenario");

  {
    Obj o(ctx, top.raw("index_set"), "/index_set");
    s.f1_hz = o.positive("f1_hz", 50.0);
    s.h_max = static_cast<int>(o.integer("h_max", 25, 1));
  }

  {
    Obj o(ctx, top.raw("network"), "/network");
    s.v_base_rms_v = o.positive("v_base_rms_v", 230.0);
    s.p_base_w = o.positive("p_base_w", 50e3);
    const Json& nodes = o.array("nodes");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const std::string p = "/network/nodes/" + std::to_string(k);
      if (!nodes[k].is_string() || nodes[k].get<std::string>().empty()) ctx.fail(p, "expected a node name");
      const std::string n = nodes[k].get<std::string>();
      if (!seen.insert(n).second) ctx.fail(p, "duplicate node '" + n + "'");
      if (n.find(".emf") != std::string::npos) ctx.fail(p, "node names may not contain '.emf'");
      s.nodes.push_back(n);
    }
    auto need_node = [&](const std::string& p, const std::string& n) {
      if (!seen.count(n)) ctx.fail(p, "unknown node '" + n + "'");
    };

    if (o.has("line_types")) {
      const Json& lt = o.raw("line_types");
      if (!lt.is_object()) ctx.fail("/network/line_types", "expected an object");
      for (auto it = lt.begin(); it != lt.end(); ++it) {
        Obj t(ctx, it.value(), "/network/line_types/" + it.key());
        LineType x;
        x.r_pos_ohm_per_km = t.non_negative("r_pos_ohm_per_km", 0.0);
        x.r_zero_ohm_per_km = t.non_negative("r_zero_ohm_per_km", 0.0);
        x.l_pos_h_per_km = t.non_negative("l_pos_h_per_km", 0.0);
        x.l_zero_h_per_km = t.non_negative("l_zero_h_per_km", 0.0);
        x.c_pos_f_per_km = t.non_negative("c_pos_f_per_km", 0.0);
        x.c_zero_f_per_km = t.non_negative("c_zero_f_per_km", 0.0);
        s.line_types[it.key()] = x;
      }
    } else {
      o.raw("line_types", false);
    }
    const Json& lines = o.array("lines", false);
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const std::string p = "/network/lines/" + std::to_string(k);
      Obj l(ctx, lines[k], p);
      LineEntry e;
      e.from = l.str("from");
      e.to = l.str("to");
      need_node(p + "/from", e.from);
      need_node(p + "/to", e.to);
      if (e.from == e.to) ctx.fail(p, "line connects a node to itself");
      e.length_m = l.positive("length_m", 0.0);
      e.type = l.str("type");
      if (!s.line_types.count(e.type)) ctx.fail(p + "/type", "unknown line type '" + e.type + "'");
      s.lines.push_back(e);
    }
    const Json& loads = o.array("loads", false);
    for (std::size_t k = 0; k < loads.size(); ++k) {
      const std::string p = "/network/loads/" + std::to_string(k);
      Obj l(ctx, loads[k], p);
      LoadSpec ld;
      ld.node = l.str("node");
      need_node(p + "/node", ld.node);
      ld.power_w = l.non_negative("power_w", 0.0);
      ld.power_factor = l.positive("power_factor", 1.0);
      if (ld.power_factor > 1.0) ctx.fail(p + "/power_factor", "must not exceed 1");
      if (l.has("phase_weights")) {
        const Json& w = l.array("phase_weights");
        if (w.size() != 3) ctx.fail(p + "/phase_weights", "expected three weights");
        for (int q = 0; q < 3; ++q) {
          if (!w[q].is_number() || w[q].get<double>() < 0.0)
            ctx.fail(p + "/phase_weights/" + std::to_string(q), "expected a non-negative number");
          ld.weights[q] = w[q].get<double>();
        }
      } else {
        l.raw("phase_weights", false);
      }
      s.loads.push_back(ld);
    }
    const Json& te = o.array("thevenin");
    if (te.empty()) ctx.fail("/network/thevenin", "at least one grid-forming source is required");
    for (std::size_t k = 0; k < te.size(); ++k) {
      const std::string p = "/network/thevenin/" + std::to_string(k);
      s.thevenin.push_back(read_thevenin(ctx, te[k], p, true));
      need_node(p + "/node", s.thevenin.back().node);
    }
    try {
      s.network().validate();
    } catch (const Error& e) {
      ctx.fail("/network", e.what());
    }
  }

  {
    const Json& rs = top.array("resources", false);
    std::set<std::string> names, at;
    for (std::size_t k = 0; k < rs.size(); ++k) {
      const std::string p = "/resources/" + std::to_string(k);
      Obj r(ctx, rs[k], p);
      ResourceSpec x;
      x.name = r.str("name");
      if (!names.insert(x.name).second) ctx.fail(p + "/name", "duplicate resource name");
      x.node = r.str("node");
      if (std::find(s.nodes.begin(), s.nodes.end(), x.node) == s.nodes.end())
        ctx.fail(p + "/node", "unknown node '" + x.node + "'");
      if (!at.insert(x.node).second) ctx.fail(p + "/node", "only one resource per node is supported");
      x.dc_side = r.boolean("dc_side", true);
      x.params = read_params(r);
      Obj sp(ctx, r.raw("setpoints"), p + "/setpoints");
      x.setpoints.p_w = sp.num("p_w", 0.0);
      x.setpoints.q_var = sp.num("q_var", 0.0);
      x.setpoints.v_dc = sp.positive("v_dc_v", 900.0);
      sp.finish();
      try {
        x.params.validate();
      } catch (const Error& e) {
        ctx.fail(p + "/params", e.what());
      }
      s.resources.push_back(x);
    }
  }

  if (top.has("study")) {
    Obj o(ctx, top.raw("study"), "/study");
    s.study.mode = o.str("mode", "hpf");
    if (!kModes.count(s.study.mode)) ctx.fail("/study/mode", "unknown mode '" + s.study.mode + "'");
    s.study.hpf.epsilon = o.positive("epsilon_pu", 1e-8);
    s.study.hpf.max_iter = static_cast<int>(o.integer("max_iter", 50, 0));
    s.study.hpf.step_halving = o.boolean("step_halving", false);
    s.study.output_dir = o.str("output_dir", "out");
    s.study.seed = static_cast<std::uint64_t>(o.integer("seed", 1, 0));
    s.study.robustness_starts = static_cast<int>(o.integer("robustness_starts", 20, 1));
    if (o.has("oracle")) {
      Obj t(ctx, o.raw("oracle"), "/study/oracle");
      TdsOptions& d = s.study.tds;
      d.samples_per_period = static_cast<int>(t.integer("samples_per_period", d.samples_per_period, 1));
      d.max_duration_s = t.positive("max_duration_s", d.max_duration_s);
      d.settle_tolerance_pu = t.positive("settle_tolerance_pu", d.settle_tolerance_pu);
      d.min_periods = static_cast<int>(t.integer("min_periods", d.min_periods, 1));
      d.dft_periods = static_cast<int>(t.integer("dft_periods", d.dft_periods, 1));
      d.record_samples_per_period =
          static_cast<int>(t.integer("record_samples_per_period", d.record_samples_per_period, 1));
      const int block = 2 * (2 * s.h_max + 1);
      if (d.record_samples_per_period % block != 0)
        ctx.fail("/study/oracle/record_samples_per_period", "must be a multiple of " + std::to_string(block));
      if (d.samples_per_period % d.record_samples_per_period != 0)
        ctx.fail("/study/oracle/samples_per_period", "must be a multiple of record_samples_per_period");
    } else {
      o.raw("oracle", false);
    }
    if (o.has("ratios")) {
      Obj r(ctx, o.raw("ratios"), "/study/ratios");
      s.study.ratios.rated_power_w = r.positive("rated_power_w", 57e3);
      s.study.ratios.power_factor = r.positive("power_factor", 0.95);
      if (s.study.ratios.power_factor > 1.0) ctx.fail("/study/ratios/power_factor", "must not exceed 1");
      s.study.ratios.thevenin = read_thevenin(ctx, r.raw("thevenin"), "/study/ratios/thevenin", false);
    } else {
      o.raw("ratios", false);
      s.study.ratios.thevenin = s.thevenin.front();
    }
  } else {
    top.raw("study", false);
    s.study.ratios.thevenin = s.thevenin.front();
  }
  top.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Schema, path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string dump_scenario(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["index_set"] = Json{{"f1_hz", s.f1_hz}, {"h_max", s.h_max}};
  Json net;
  net["v_base_rms_v"] = s.v_base_rms_v;
  net["p_base_w"] = s.p_base_w;
  net["nodes"] = s.nodes;
  net["line_types"] = Json::object();
  for (const auto& [name, t] : s.line_types)
    net["line_types"][name] = Json{{"r_pos_ohm_per_km", t.r_pos_ohm_per_km}, {"r_zero_ohm_per_km", t.r_zero_ohm_per_km},
                                   {"l_pos_h_per_km", t.l_pos_h_per_km},     {"l_zero_h_per_km", t.l_zero_h_per_km},
                                   {"c_pos_f_per_km", t.c_pos_f_per_km},     {"c_zero_f_per_km", t.c_zero_f_per_km}};
  net["lines"] = Json::array();
  for (const auto& l : s.lines)
    net["lines"].push_back(Json{{"from", l.from}, {"to", l.to}, {"length_m", l.length_m}, {"type", l.type}});
  net["loads"] = Json::array();
  for (const auto& l : s.loads)
    net["loads"].push_back(Json{{"node", l.node},
                                {"power_w", l.power_w},
                                {"power_factor", l.power_factor},
                                {"phase_weights", {l.weights[0], l.weights[1], l.weights[2]}}});
  net["thevenin"] = Json::array();
  for (const auto& t : s.thevenin) net["thevenin"].push_back(thevenin_json(t));
  j["network"] = net;

  j["resources"] = Json::array();
  for (const auto& r : s.resources) {
    const CiderParams& p = r.params;
    Json params{{"l_alpha_h", p.l_alpha}, {"r_alpha_ohm", p.r_alpha}, {"c_phi_f", p.c_phi},
                {"g_phi_s", p.g_phi},     {"l_gamma_h", p.l_gamma},   {"r_gamma_ohm", p.r_gamma},
                {"c_delta_f", p.c_delta}, {"g_delta_s", p.g_delta},   {"rated_va", p.rated_va}};
    params["alpha"] = stage_json(p.alpha);
    params["phi"] = stage_json(p.phi);
    params["gamma"] = stage_json(p.gamma);
    params["delta"] = stage_json(p.delta);
    j["resources"].push_back(Json{{"name", r.name},
                                  {"node", r.node},
                                  {"dc_side", r.dc_side},
                                  {"params", params},
                                  {"setpoints",
                                   {{"p_w", r.setpoints.p_w}, {"q_var", r.setpoints.q_var}, {"v_dc_v", r.setpoints.v_dc}}}});
  }

  const StudySettings& st = s.study;
  Json study;
  study["mode"] = st.mode;
  study["epsilon_pu"] = st.hpf.epsilon;
  study["max_iter"] = st.hpf.max_iter;
  study["step_halving"] = st.hpf.step_halving;
  study["output_dir"] = st.output_dir;
  study["seed"] = st.seed;
  study["robustness_starts"] = st.robustness_starts;
  study["oracle"] = Json{{"samples_per_period", st.tds.samples_per_period},
                         {"max_duration_s", st.tds.max_duration_s},
                         {"settle_tolerance_pu", st.tds.settle_tolerance_pu},
                         {"min_periods", st.tds.min_periods},
                         {"dft_periods", st.tds.dft_periods},
                         {"record_samples_per_period", st.tds.record_samples_per_period}};
  Json te = thevenin_json(st.ratios.thevenin);
  study["ratios"] = Json{{"rated_power_w", st.ratios.rated_power_w},
                         {"power_factor", st.ratios.power_factor},
                         {"thevenin", te}};
  j["study"] = study;
  return j.dump(2) + "\n";
}

}  // namespace hpf
