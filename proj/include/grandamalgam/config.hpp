#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "amalgam.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "expr_json.hpp"
#include "grand_norm.hpp"

namespace grandamalgam {

inline constexpr int kSchemaVersion = 1;

struct NamedSequence {
  std::string name;
  std::vector<double> entries;
};

struct SweepGrids {
  std::vector<double> p{1.5, 2.0, 3.0, 5.0};
  std::vector<double> q{1.5, 2.0, 3.0};
  std::vector<double> theta{0.0, 0.5, 1.0, 2.0};
  std::vector<double> a{0.1, 0.01, 0.001};
  std::vector<double> eps{1.0, 0.5, 0.25, 0.1, 0.01, 0.001, 1e-4};
  std::vector<double> window_width{0.25, 0.5, 1.0};
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  double lower = 0.0, upper = 1.0;
  double p = 2.0, q = 2.0, theta1 = 1.0, theta2 = 1.0;
  double window_offset = 0.0, window_width = 1.0;
  double witness_offset = -0.5, witness_width = 1.0;
  XDomain x_domain = XDomain::omega;
  std::vector<NamedFunction> functions;
  std::vector<NamedSequence> sequences;

  int eps_points = 200;
  int x_points = 257;
  int max_x_points = 4097;
  int chain_points = 10;
  std::vector<double> ladder{1.0, 2.0, 4.0, 8.0, 16.0, std::numeric_limits<double>::infinity()};
  std::vector<double> acn_a{0.1, 0.01, 0.001};
  std::vector<double> vanish_eps{1.0, 0.1, 0.01, 1e-3, 1e-4};
  std::vector<std::array<double, 3>> strictness{{2.0, 2.0, 1.0}, {2.0, 1.5, 1.0}, {2.0, 2.0, 2.0}};
  std::vector<std::array<double, 2>> diagonal{{2.0, 1.0}, {3.0, 1.0}};
  SweepGrids sweep;

  double quad_rel_tol = 1e-9;
  int max_panels = 2000;
  double check_tol = 1e-6;
  double eps_resolution = 1e-8;
  double r_cap = 64.0;
  double outer_rel_change = 1e-6;

  std::string output_dir = "out";
  std::vector<std::string> claims;

  MeasureSpace omega() const { return MeasureSpace(lower, upper); }
  GrandExponent g1() const { return GrandExponent(p, theta1); }
  GrandExponent g2() const { return GrandExponent(q, theta2); }
  Window window() const { return Window(window_offset, window_width); }
  Window witness_window() const { return Window(witness_offset, witness_width); }

  GrandOptions grand_options() const {
    GrandOptions o;
    o.eps_points = eps_points;
    o.eps_resolution = eps_resolution;
    o.r_cap = r_cap;
    o.quadrature = {quad_rel_tol, max_panels};
    return o;
  }

  AmalgamOptions amalgam_options(int jobs = 1) const {
    AmalgamOptions o;
    o.grid_points = x_points;
    o.max_grid_points = max_x_points;
    o.outer_rel_change = outer_rel_change;
    o.x_domain = x_domain;
    o.jobs = jobs;
    o.inner = grand_options();
    return o;
  }

  const Expr& function(const std::string& name) const {
    for (const auto& f : functions)
      if (f.name == name) return f.expr;
    throw Error(ErrorKind::config, "unknown function \"" + name + "\"");
  }

  const NamedSequence& sequence(const std::string& name) const {
    for (const auto& s : sequences)
      if (s.name == name) return s;
    throw Error(ErrorKind::config, "unknown sequence \"" + name + "\"");
  }
};

inline const std::vector<std::string>& known_claims() {
  static const std::vector<std::string> ids{
      "D2.sandwich", "P1.chain",  "P1.embed",  "P1.eq5",    "P1.solid",  "P1.strict", "P23.mono",
      "P4.product",  "P5.diag",   "P6.vanish", "P7.nondense", "T10.acn", "T2.window", "T3.P1",
      "T3.P2",       "T3.P3",     "T3.P4",     "T3.P5",     "T3.P6",     "T3.P7",     "T3.P8",
      "T7.holder"};
  return ids;
}

// A filter entry selects every claim id equal to it or starting with it followed by '.'.
inline bool claim_selected(const std::string& id, const std::vector<std::string>& filter) {
  if (filter.empty()) return true;
  for (const auto& f : filter)
    if (id == f || (id.size() > f.size() && id.compare(0, f.size(), f) == 0 && id[f.size()] == '.')) return true;
  return false;
}

inline std::string to_string(XDomain d) { return d == XDomain::omega ? "omega" : "translates"; }

inline ExperimentConfig default_config() {
  ExperimentConfig c;
  c.functions = default_corpus(c.omega());
  c.sequences = {{"unit", {1.0}}, {"zeros", {0.0, 0.0, 0.0}}, {"three", {3.0}}, {"harmonic", {1.0, 0.5, 1.0 / 3.0, 0.25}}};
  return c;
}

namespace detail {

inline json doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(extended_to_json(x));
  return a;
}

template <std::size_t N>
inline json tuples(const std::vector<std::array<double, N>>& v) {
  json a = json::array();
  for (const auto& t : v) a.push_back(json(t));
  return a;
}

}  // namespace detail

inline json config_to_json(const ExperimentConfig& c) {
  json fs = json::array();
  for (const auto& f : c.functions) fs.push_back({{"name", f.name}, {"expr", to_json(f.expr)}});
  json ss = json::array();
  for (const auto& s : c.sequences) ss.push_back({{"name", s.name}, {"entries", s.entries}});
  return {
      {"schema_version", c.schema_version},
      {"measure_space", {{"lower", c.lower}, {"upper", c.upper}}},
      {"exponents", {{"p", c.p}, {"q", c.q}, {"theta1", c.theta1}, {"theta2", c.theta2}}},
      {"window", {{"offset", c.window_offset}, {"width", c.window_width}}},
      {"witness_window", {{"offset", c.witness_offset}, {"width", c.witness_width}}},
      {"x_domain", to_string(c.x_domain)},
      {"functions", fs},
      {"sequences", ss},
      {"grids",
       {{"eps_points", c.eps_points},
        {"x_points", c.x_points},
        {"max_x_points", c.max_x_points},
        {"chain_points", c.chain_points},
        {"ladder", detail::doubles(c.ladder)},
        {"acn_a", detail::doubles(c.acn_a)},
        {"vanish_eps", detail::doubles(c.vanish_eps)},
        {"strictness", detail::tuples(c.strictness)},
        {"diagonal", detail::tuples(c.diagonal)},
        {"sweep",
         {{"p", detail::doubles(c.sweep.p)},
          {"q", detail::doubles(c.sweep.q)},
          {"theta", detail::doubles(c.sweep.theta)},
          {"a", detail::doubles(c.sweep.a)},
          {"eps", detail::doubles(c.sweep.eps)},
          {"window_width", detail::doubles(c.sweep.window_width)}}}}},
      {"tolerances",
       {{"quad_rel_tol", c.quad_rel_tol},
        {"max_panels", c.max_panels},
        {"check_tol", c.check_tol},
        {"eps_resolution", c.eps_resolution},
        {"r_cap", c.r_cap},
        {"outer_rel_change", c.outer_rel_change}}},
      {"output", {{"dir", c.output_dir}}},
      {"claims", c.claims},
  };
}

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::config, m); };
  if (c.schema_version != kSchemaVersion)
    fail("schema_version " + std::to_string(c.schema_version) + " does not match " + std::to_string(kSchemaVersion));
  if (!(c.lower < c.upper) || !std::isfinite(c.lower) || !std::isfinite(c.upper)) fail("measure_space needs lower < upper");
  if (!(c.p > 1.0) || !(c.q > 1.0) || !std::isfinite(c.p) || !std::isfinite(c.q)) fail("exponents need 1 < p, q < inf");
  if (!(c.theta1 >= 0.0) || !(c.theta2 >= 0.0)) fail("theta must be >= 0");
  if (!(c.window_width > 0.0) || !(c.witness_width > 0.0)) fail("window width must be > 0");
  if (c.eps_points < 3 || c.eps_points > 100000) fail("grids.eps_points must lie in [3, 100000]");
  if (c.x_points < 33 || c.x_points % 2 == 0) fail("grids.x_points must be odd and >= 33");
  if (c.max_x_points < c.x_points) fail("grids.max_x_points must be >= x_points");
  if (c.chain_points < 1 || c.chain_points > 100) fail("grids.chain_points must lie in [1, 100]");
  if (!(c.quad_rel_tol > 0.0) || c.quad_rel_tol > 1e-2) fail("tolerances.quad_rel_tol must lie in (0, 1e-2]");
  if (c.max_panels < 1) fail("tolerances.max_panels must be >= 1");
  if (!(c.check_tol >= 0.0)) fail("tolerances.check_tol must be >= 0");
  if (!(c.eps_resolution > 0.0)) fail("tolerances.eps_resolution must be > 0");
  if (!(c.r_cap >= 2.0)) fail("tolerances.r_cap must be >= 2");
  if (!(c.outer_rel_change > 0.0)) fail("tolerances.outer_rel_change must be > 0");
  for (double l : c.ladder)
    if (!(l > 0.0)) fail("grids.ladder levels must be > 0");
  for (std::size_t i = 0; i < c.acn_a.size(); ++i) {
    if (!(c.acn_a[i] > 0.0 && c.acn_a[i] < 1.0)) fail("grids.acn_a entries must lie in (0, 1)");
    if (i > 0 && !(c.acn_a[i] < c.acn_a[i - 1])) fail("grids.acn_a must be descending");
  }
  const double eps_top = std::min(c.p, c.q) - 1.0;
  for (double e : c.vanish_eps)
    if (!(e > 0.0 && e <= eps_top)) fail("grids.vanish_eps entries must lie in (0, min(p,q)-1]");
  for (const auto& s : c.strictness)
    if (!(s[0] > 1.0 && s[1] > 1.0 && s[1] <= s[0] && s[2] >= 0.0)) fail("grids.strictness needs 1 < q <= p and theta >= 0");
  for (const auto& d : c.diagonal)
    if (!(d[0] > 1.0 && d[1] >= 0.0)) fail("grids.diagonal needs p > 1 and theta >= 0");
  std::set<std::string> names;
  for (const auto& f : c.functions) {
    if (f.name.empty() || !names.insert(f.name).second) fail("function names must be unique and nonempty");
    try {
      validate_on(f.expr, {c.lower, c.upper});
    } catch (const Error& e) {
      fail("function \"" + f.name + "\": " + e.what());
    }
  }
  names.clear();
  for (const auto& s : c.sequences) {
    if (s.name.empty() || !names.insert(s.name).second) fail("sequence names must be unique and nonempty");
    if (s.entries.empty()) fail("sequence \"" + s.name + "\" is empty");
  }
  for (const auto& id : c.claims) {
    bool any = false;
    for (const auto& k : known_claims()) any = any || claim_selected(k, {id});
    if (!any) fail("claim filter \"" + id + "\" matches no claim");
  }
  if (c.output_dir.empty()) fail("output.dir must be nonempty");
}

namespace detail {

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::config, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

inline void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::config, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) throw Error(ErrorKind::config, "unknown key \"" + k + "\" in " + where);
  }
}

inline std::vector<double> read_doubles(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::config, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(extended_from_json(v, what));
  return out;
}

template <std::size_t N>
inline std::vector<std::array<double, N>> read_tuples(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::config, std::string(what) + " must be an array");
  std::vector<std::array<double, N>> out;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != N) throw Error(ErrorKind::config, std::string(what) + " has a malformed entry");
    std::array<double, N> a{};
    for (std::size_t i = 0; i < N; ++i) a[i] = extended_from_json(t[i], what);
    out.push_back(a);
  }
  return out;
}

}  // namespace detail

// Missing sections keep their defaults; present sections are read strictly.
inline ExperimentConfig config_from_json(const json& j) {
  using detail::need;
  ExperimentConfig c = default_config();
  try {
    detail::only_keys(j, {"schema_version", "measure_space", "exponents", "window", "witness_window", "x_domain",
                          "functions", "sequences", "grids", "tolerances", "output", "claims"},
                      "config");
    c.schema_version = need(j, "schema_version").get<int>();
    if (c.schema_version != kSchemaVersion)
      throw Error(ErrorKind::config, "schema_version " + std::to_string(c.schema_version) + " does not match " +
                                         std::to_string(kSchemaVersion));
    if (j.contains("measure_space")) {
      const json& m = j["measure_space"];
      detail::only_keys(m, {"lower", "upper"}, "measure_space");
      c.lower = need(m, "lower").get<double>();
      c.upper = need(m, "upper").get<double>();
      if (!j.contains("functions")) c.functions = default_corpus(MeasureSpace(c.lower, c.upper));
    }
    if (j.contains("exponents")) {
      const json& e = j["exponents"];
      detail::only_keys(e, {"p", "q", "theta1", "theta2"}, "exponents");
      c.p = need(e, "p").get<double>();
      c.q = need(e, "q").get<double>();
      c.theta1 = need(e, "theta1").get<double>();
      c.theta2 = need(e, "theta2").get<double>();
    }
    for (const char* key : {"window", "witness_window"}) {
      if (!j.contains(key)) continue;
      const json& w = j[key];
      detail::only_keys(w, {"offset", "width"}, key);
      double off = need(w, "offset").get<double>(), wid = need(w, "width").get<double>();
      if (std::string(key) == "window") {
        c.window_offset = off;
        c.window_width = wid;
      } else {
        c.witness_offset = off;
        c.witness_width = wid;
      }
    }
    if (j.contains("x_domain")) {
      std::string d = j["x_domain"].get<std::string>();
      if (d == "omega") {
        c.x_domain = XDomain::omega;
      } else if (d == "translates") {
        c.x_domain = XDomain::translates;
      } else {
        throw Error(ErrorKind::config, "x_domain must be \"omega\" or \"translates\"");
      }
    }
    if (j.contains("functions")) {
      c.functions.clear();
      for (const auto& f : j["functions"]) {
        detail::only_keys(f, {"name", "expr"}, "function entry");
        c.functions.push_back({need(f, "name").get<std::string>(), expr_from_json(need(f, "expr"))});
      }
    }
    if (j.contains("sequences")) {
      c.sequences.clear();
      for (const auto& s : j["sequences"]) {
        detail::only_keys(s, {"name", "entries"}, "sequence entry");
        c.sequences.push_back({need(s, "name").get<std::string>(), detail::read_doubles(need(s, "entries"), "entries")});
      }
    }
    if (j.contains("grids")) {
      const json& g = j["grids"];
      detail::only_keys(g, {"eps_points", "x_points", "max_x_points", "chain_points", "ladder", "acn_a", "vanish_eps",
                            "strictness", "diagonal", "sweep"},
                        "grids");
      if (g.contains("eps_points")) c.eps_points = g["eps_points"].get<int>();
      if (g.contains("x_points")) c.x_points = g["x_points"].get<int>();
      if (g.contains("max_x_points")) c.max_x_points = g["max_x_points"].get<int>();
      if (g.contains("chain_points")) c.chain_points = g["chain_points"].get<int>();
      if (g.contains("ladder")) c.ladder = detail::read_doubles(g["ladder"], "ladder");
      if (g.contains("acn_a")) c.acn_a = detail::read_doubles(g["acn_a"], "acn_a");
      if (g.contains("vanish_eps")) c.vanish_eps = detail::read_doubles(g["vanish_eps"], "vanish_eps");
      if (g.contains("strictness")) c.strictness = detail::read_tuples<3>(g["strictness"], "strictness");
      if (g.contains("diagonal")) c.diagonal = detail::read_tuples<2>(g["diagonal"], "diagonal");
      if (g.contains("sweep")) {
        const json& s = g["sweep"];
        detail::only_keys(s, {"p", "q", "theta", "a", "eps", "window_width"}, "grids.sweep");
        if (s.contains("p")) c.sweep.p = detail::read_doubles(s["p"], "sweep.p");
        if (s.contains("q")) c.sweep.q = detail::read_doubles(s["q"], "sweep.q");
        if (s.contains("theta")) c.sweep.theta = detail::read_doubles(s["theta"], "sweep.theta");
        if (s.contains("a")) c.sweep.a = detail::read_doubles(s["a"], "sweep.a");
        if (s.contains("eps")) c.sweep.eps = detail::read_doubles(s["eps"], "sweep.eps");
        if (s.contains("window_width")) c.sweep.window_width = detail::read_doubles(s["window_width"], "sweep.window_width");
      }
    }
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      detail::only_keys(t, {"quad_rel_tol", "max_panels", "check_tol", "eps_resolution", "r_cap", "outer_rel_change"},
                        "tolerances");
      if (t.contains("quad_rel_tol")) c.quad_rel_tol = t["quad_rel_tol"].get<double>();
      if (t.contains("max_panels")) c.max_panels = t["max_panels"].get<int>();
      if (t.contains("check_tol")) c.check_tol = t["check_tol"].get<double>();
      if (t.contains("eps_resolution")) c.eps_resolution = t["eps_resolution"].get<double>();
      if (t.contains("r_cap")) c.r_cap = t["r_cap"].get<double>();
      if (t.contains("outer_rel_change")) c.outer_rel_change = t["outer_rel_change"].get<double>();
    }
    if (j.contains("output")) {
      detail::only_keys(j["output"], {"dir"}, "output");
      c.output_dir = need(j["output"], "dir").get<std::string>();
    }
    if (j.contains("claims")) c.claims = j["claims"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, e.what());
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace grandamalgam
