#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amalgam.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "expr_json.hpp"
#include "grand_norm.hpp"
#include "parallel.hpp"
#include "small_dual.hpp"

namespace grandamalgam {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct CheckReport {
  std::string claim_id;
  json inputs;
  std::string inputs_digest;
  std::vector<std::pair<std::string, double>> quantities;
  double margin = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::inconclusive;
  std::string note;
  std::optional<PairingReport> pairing;

  double quantity(const std::string& key) const {
    for (const auto& [k, v] : quantities)
      if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline double normalized_margin(double lhs, double rhs) { return (rhs - lhs) / std::max(1.0, std::fabs(rhs)); }

// vanishing_functional: V(eps) = eps^{theta/(p-eps)} ‖f‖_{W(L^{p-eps}, L^{q-eps})}, in descending eps.
inline std::vector<std::pair<double, double>> vanishing_functional(const Expr& f, const GrandExponent& g1,
                                                                   const GrandExponent& g2, const Window& q,
                                                                   const MeasureSpace& omega,
                                                                   std::vector<double> eps_grid,
                                                                   const AmalgamOptions& opt = {}) {
  const double top = std::min(g1.p(), g2.p()) - 1.0;
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  std::vector<std::pair<double, double>> out;
  for (double e : eps_grid) {
    if (!(e > 0.0 && e <= top)) throw Error(ErrorKind::invalid_argument, "eps grid must lie in (0, min(p,q)-1]");
    double n = lebesgue_amalgam_norm(f, g1.p() - e, g2.p() - e, q, omega, opt).norm.value;
    double pre = g1.theta() == 0.0 ? 1.0 : std::pow(e, g1.theta() / (g1.p() - e));
    out.push_back({e, n == 0.0 ? 0.0 : pre * n});
  }
  return out;
}

// acn_tail: T(a) = amalgam norm of f χ_(lo, lo+a) with Q = (0, a).
inline std::vector<std::pair<double, double>> acn_tail(const Expr& f, const GrandExponent& g1, const GrandExponent& g2,
                                                       const MeasureSpace& omega, const std::vector<double>& a_list,
                                                       const AmalgamOptions& opt = {}) {
  std::vector<std::pair<double, double>> out;
  for (double a : a_list) {
    if (!(a > 0.0 && a < omega.mass())) throw Error(ErrorKind::invalid_argument, "a must lie in (0, |Omega|)");
    Expr fa = Expr::product({f, Expr::indicator(omega.lower(), omega.lower() + a)});
    out.push_back({a, amalgam_norm(fa, g1, g2, Window(0.0, a), omega, opt).norm.value});
  }
  return out;
}

class VerifySuite {
 public:
  explicit VerifySuite(ExperimentConfig cfg, int jobs = 1)
      : cfg_(std::move(cfg)), omega_(cfg_.omega()), g1_(cfg_.g1()), g2_(cfg_.g2()), q_(cfg_.window()),
        witness_(cfg_.witness_window()), opt_(cfg_.amalgam_options(1)), jobs_(jobs) {
    validate(cfg_);
  }

  std::vector<CheckReport> run(const std::vector<std::string>& filter) {
    struct Job {
      std::string id;
      std::function<void(std::vector<CheckReport>&)> fn;
    };
    std::vector<Job> jobs = {
        {"T3.P1", [&](auto& out) { p_nonneg(out); }},     {"T3.P2", [&](auto& out) { p_definite(out); }},
        {"T3.P3", [&](auto& out) { p_homogeneous(out); }}, {"T3.P4", [&](auto& out) { p_triangle(out); }},
        {"T3.P5", [&](auto& out) { p_solid(out); }},      {"T3.P6", [&](auto& out) { p_fatou(out); }},
        {"T3.P7", [&](auto& out) { p_indicator(out); }},  {"T3.P8", [&](auto& out) { p_local_l1(out); }},
        {"P1.eq5", [&](auto& out) { eq5(out); }},         {"P1.strict", [&](auto& out) { strict(out); }},
        {"P1.chain", [&](auto& out) { chain(out); }},     {"P1.embed", [&](auto& out) { embed(out); }},
        {"P1.solid", [&](auto& out) { solid_bound(out); }}, {"P23.mono", [&](auto& out) { exponent_mono(out); }},
        {"P4.product", [&](auto& out) { product(out); }}, {"P5.diag", [&](auto& out) { diagonal(out); }},
        {"T2.window", [&](auto& out) { window_ratio(out); }}, {"T7.holder", [&](auto& out) { holder(out); }},
        {"D2.sandwich", [&](auto& out) { sandwich(out); }}, {"P6.vanish", [&](auto& out) { vanish(out); }},
        {"P7.nondense", [&](auto& out) { nondense(out); }}, {"T10.acn", [&](auto& out) { acn(out); }},
    };
    std::vector<Job> chosen;
    for (auto& j : jobs)
      if (claim_selected(j.id, filter)) chosen.push_back(std::move(j));
    std::vector<std::vector<CheckReport>> results(chosen.size());
    parallel_for(chosen.size(), jobs_, [&](std::size_t i) {
      try {
        chosen[i].fn(results[i]);
      } catch (const Error& e) {
        CheckReport r;
        r.claim_id = chosen[i].id;
        r.inputs = json::object();
        r.note = e.what();
        results[i].push_back(r);
      }
    });
    std::vector<CheckReport> all;
    for (auto& r : results)
      for (auto& c : r) {
        c.inputs_digest = fnv1a_hex(c.claim_id + c.inputs.dump());
        all.push_back(std::move(c));
      }
    std::stable_sort(all.begin(), all.end(),
                     [](const CheckReport& a, const CheckReport& b) { return a.claim_id < b.claim_id; });
    return all;
  }

 private:
  // Cached outcome of an amalgam-type computation, keyed by its JSON description.
  const AmalgamOutcome& memo(const json& key, const std::function<AmalgamOutcome()>& compute) {
    std::string k = key.dump();
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = memo_.find(k);
      if (it != memo_.end()) return *it->second;
    }
    auto v = std::make_shared<AmalgamOutcome>(compute());
    std::lock_guard<std::mutex> lock(mu_);
    return *memo_.emplace(k, std::move(v)).first->second;
  }

  static json exps(const GrandExponent& g) { return json::array({g.p(), g.theta()}); }
  static json win(const Window& w) { return json::array({w.offset(), w.width()}); }

  const AmalgamOutcome& grand_w(const Expr& f, const GrandExponent& a, const GrandExponent& b, const Window& q) {
    json key = {{"grand", to_json(f)}, {"g1", exps(a)}, {"g2", exps(b)}, {"q", win(q)}};
    return memo(key, [&] { return amalgam_norm(f, a, b, q, omega_, opt_); });
  }
  const AmalgamOutcome& norm_w(const Expr& f) { return grand_w(f, g1_, g2_, q_); }

  const AmalgamOutcome& classical_w(const Expr& f, double r_in, double r_out, const Window& q) {
    json key = {{"classical", to_json(f)}, {"r", {extended_to_json(r_in), extended_to_json(r_out)}}, {"q", win(q)}};
    return memo(key, [&] { return lebesgue_amalgam_norm(f, r_in, r_out, q, omega_, opt_); });
  }

  json base_inputs(const std::string& fname, const Expr& f) const {
    return {{"function", fname}, {"expr", to_json(f)}, {"g1", exps(g1_)}, {"g2", exps(g2_)}, {"window", win(q_)},
            {"omega", {omega_.lower(), omega_.upper()}}, {"x_domain", to_string(cfg_.x_domain)}};
  }

  CheckReport inequality(const std::string& id, json inputs, double lhs, double rhs,
                         std::vector<std::pair<std::string, double>> extra = {}) const {
    CheckReport r;
    r.claim_id = id;
    r.inputs = std::move(inputs);
    r.quantities = {{"lhs", lhs}, {"rhs", rhs}};
    for (auto& e : extra) r.quantities.push_back(std::move(e));
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      r.note = "a required norm is +inf";
      return r;
    }
    r.margin = normalized_margin(lhs, rhs);
    r.verdict = r.margin >= -cfg_.check_tol ? Verdict::pass : Verdict::fail;
    return r;
  }

  CheckReport judged(const std::string& id, json inputs, double margin,
                     std::vector<std::pair<std::string, double>> qs, std::string note = {}) const {
    CheckReport r;
    r.claim_id = id;
    r.inputs = std::move(inputs);
    r.quantities = std::move(qs);
    r.margin = margin;
    r.note = std::move(note);
    if (!std::isnan(margin)) r.verdict = margin >= -cfg_.check_tol ? Verdict::pass : Verdict::fail;
    return r;
  }

  bool bounded(const Expr& f) const { return is_bounded_on(f, omega_.domain()); }

  double unit_outer_norm(const GrandExponent& g, const Window& q) const {
    Interval x = x_domain_of(q, omega_, cfg_.x_domain);
    return grand_norm(Expr::constant(1.0), g, Interval{0.0, x.length()}, opt_.inner).value;
  }

  // --- Banach function space properties ---

  void p_nonneg(std::vector<CheckReport>& out) {
    for (const auto& [name, f] : cfg_.functions) {
      double n = norm_w(f).norm.value;
      out.push_back(judged("T3.P1", base_inputs(name, f), n, {{"norm", n}}));
    }
  }

  void p_definite(std::vector<CheckReport>& out) {
    const int samples = 10000;
    for (const auto& [name, f] : cfg_.functions) {
      bool nonzero = false;
      for (int i = 0; i < samples && !nonzero; ++i)
        nonzero = evaluate(f, omega_.lower() + omega_.mass() * (i + 0.5) / samples) != 0.0;
      double n = norm_w(f).norm.value;
      double margin = nonzero ? (n > 0.0 ? n : -1.0) : -n;
      out.push_back(judged("T3.P2", base_inputs(name, f), margin, {{"norm", n}, {"sample_nonzero", nonzero ? 1.0 : 0.0}}));
    }
  }

  void p_homogeneous(std::vector<CheckReport>& out) {
    for (const auto& [name, f] : cfg_.functions) {
      double n = norm_w(f).norm.value;
      for (double lambda : {0.5, 3.0}) {
        double s = norm_w(Expr::scale(lambda, f)).norm.value;
        json in = base_inputs(name, f);
        in["lambda"] = lambda;
        if (!std::isfinite(n) || !std::isfinite(s)) {
          out.push_back(judged("T3.P3", in, std::isinf(n) && std::isinf(s) ? 0.0 : -1.0,
                               {{"scaled_norm", s}, {"lambda_times_norm", lambda * n}}));
          continue;
        }
        double margin = -std::fabs(s - lambda * n) / std::max(1.0, lambda * n);
        out.push_back(judged("T3.P3", in, margin, {{"scaled_norm", s}, {"lambda_times_norm", lambda * n}}));
      }
    }
  }

  void p_triangle(std::vector<CheckReport>& out) {
    const auto& fs = cfg_.functions;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& a = fs[i];
      const auto& b = fs[(i + 1) % fs.size()];
      json in = base_inputs(a.name, a.expr);
      in["other"] = b.name;
      in["other_expr"] = to_json(b.expr);
      double lhs = norm_w(a.expr + b.expr).norm.value;
      double rhs = norm_w(a.expr).norm.value + norm_w(b.expr).norm.value;
      out.push_back(inequality("T3.P4", in, lhs, rhs));
    }
  }

  void p_solid(std::vector<CheckReport>& out) {
    const double mid = omega_.lower() + 0.5 * omega_.mass();
    for (const auto& [name, f] : cfg_.functions) {
      double n = norm_w(f).norm.value;
      std::vector<std::pair<std::string, Expr>> smaller = {
          {"restricted_lower_half", Expr::product({f, Expr::indicator(omega_.lower(), mid)})},
          {"truncated_at_1", Expr::truncate_above(1.0, f)}};
      for (const auto& [kind, h] : smaller) {
        json in = base_inputs(name, f);
        in["minorant"] = kind;
        out.push_back(inequality("T3.P5", in, norm_w(h).norm.value, n));
      }
    }
  }

  void p_fatou(std::vector<CheckReport>& out) {
    for (const auto& [name, f] : cfg_.functions) {
      json in = base_inputs(name, f);
      in["levels"] = detail::doubles(cfg_.ladder);
      double full = norm_w(f).norm.value;
      std::vector<std::pair<std::string, double>> qs{{"full", full}};
      if (!std::isfinite(full)) {
        out.push_back(judged("T3.P6", in, std::numeric_limits<double>::quiet_NaN(), qs, "full norm is +inf"));
        continue;
      }
      double prev = 0.0, margin = std::numeric_limits<double>::infinity(), last = 0.0;
      for (double level : cfg_.ladder) {
        double v = norm_w(Expr::truncate_above(level, f)).norm.value;
        qs.push_back({"level_" + (std::isinf(level) ? std::string("inf") : json(level).dump()), v});
        margin = std::min(margin, normalized_margin(prev, v));
        prev = last = v;
      }
      double rel = full == 0.0 ? std::fabs(last) : std::fabs(last - full) / full;
      qs.push_back({"final_rel_gap", rel});
      margin = std::min(margin, 1e-4 - rel);
      out.push_back(judged("T3.P6", in, margin, qs));
    }
  }

  void p_indicator(std::vector<CheckReport>& out) {
    const double lo = omega_.lower(), len = omega_.mass(), mu = len;
    const double bound = std::pow(g1_.p() - 1.0, g1_.theta()) * std::pow(g2_.p() - 1.0, g2_.theta()) *
                         std::max(std::pow(mu, 1.0 / g1_.p() + 1.0 / g2_.p()), mu * mu);
    std::vector<std::pair<std::string, Interval>> sets = {{"lower_half", {lo, lo + 0.5 * len}},
                                                          {"middle_half", {lo + 0.25 * len, lo + 0.75 * len}},
                                                          {"whole", {lo, lo + len}}};
    for (const auto& [name, e] : sets) {
      Expr chi = Expr::indicator(e.lo, e.hi);
      out.push_back(inequality("T3.P7", base_inputs(name, chi), norm_w(chi).norm.value, bound));
    }
  }

  void p_local_l1(std::vector<CheckReport>& out) {
    const double lo = omega_.lower(), mid = lo + 0.5 * omega_.mass();
    const double eps = 0.5 * (std::min(g1_.p(), g2_.p()) - 1.0);
    const double rp = GrandExponent::conjugate_of(g1_.p() - eps), rq = GrandExponent::conjugate_of(g2_.p() - eps);
    Expr chi = Expr::indicator(lo, mid);
    double c = classical_w(chi, rp, rq, q_).norm.value;
    for (const auto& [name, f] : cfg_.functions) {
      json in = base_inputs(name, f);
      in["set"] = {lo, mid};
      in["fixed_eps"] = eps;
      double n = norm_w(f).norm.value;
      double integral = std::numeric_limits<double>::infinity();
      if (divergence_threshold(f, {lo, mid}) > 1.0)
        integral = support_hull(f).intersect({lo, mid}).empty() ? 0.0 : integrate_power_mean(f, 1.0, {lo, mid}).value;
      out.push_back(inequality("T3.P8", in, integral, c * n, {{"constant", c}, {"norm", n}}));
    }
  }

  // --- strictness and inclusions ---

  void eq5(std::vector<CheckReport>& out) {
    for (double p : {1.5, 2.0, 3.0, 5.0})
      for (double theta : {1.0, 2.0}) {
        GrandExponent g(p, theta);
        Expr f = singular_witness(omega_, p);
        double v = grand_norm(f, g, omega_.domain(), opt_.inner).value;
        double bound = std::pow(p - 1.0, theta - 1.0) * p * std::pow(omega_.mass(), 1.0 / p);
        json in = {{"expr", to_json(f)}, {"g", exps(g)}, {"omega", {omega_.lower(), omega_.upper()}}};
        out.push_back(inequality("P1.eq5", in, v, bound));
      }
  }

  void strict(std::vector<CheckReport>& out) {
    for (const auto& [p, q, theta] : cfg_.strictness) {
      GrandExponent a(p, theta), b(q, theta);
      Expr f = singular_witness(omega_, p);
      json in = {{"expr", to_json(f)}, {"g1", exps(a)}, {"g2", exps(b)}, {"window", win(witness_)},
                 {"omega", {omega_.lower(), omega_.upper()}}, {"x_domain", to_string(cfg_.x_domain)}};
      if (theta < 1.0 || q > p) {
        out.push_back(judged("P1.strict", in, std::numeric_limits<double>::quiet_NaN(), {}, "needs q <= p and theta >= 1"));
        continue;
      }
      double grand = grand_w(f, a, b, witness_).norm.value;
      double bound = std::pow(q - 1.0, theta) * std::pow(p, theta);
      double classical;
      std::string note;
      try {
        classical = classical_w(f, p, q, witness_).norm.value;
      } catch (const Error& e) {
        classical = std::numeric_limits<double>::quiet_NaN();
        note = e.what();
      }
      double margin = std::isfinite(grand) ? normalized_margin(grand, bound) : -1.0;
      if (!(std::isinf(classical))) margin = std::min(margin, -1.0);
      out.push_back(judged("P1.strict", in, margin, {{"grand_norm", grand}, {"bound", bound}, {"classical_norm", classical}}, note));
    }
  }

  void chain(std::vector<CheckReport>& out) {
    const int n = cfg_.chain_points;
    for (const auto& [name, f] : cfg_.functions) {
      const AmalgamOutcome& w = norm_w(f);
      json in = base_inputs(name, f);
      in["chain_points"] = n;
      if (!w.norm.finite()) {
        out.push_back(judged("P1.chain", in, std::numeric_limits<double>::quiet_NaN(), {{"norm", w.norm.value}}, "norm is +inf"));
        continue;
      }
      double margin = std::numeric_limits<double>::infinity(), worst = 0.0;
      for (int i = 1; i <= n; ++i) {
        double eps = g1_.eps_max() * i / n;
        ControlCurve c = lebesgue_control_on(w.curve, f, g1_.p() - eps, q_, omega_, opt_);
        double pe = std::pow(eps, g1_.theta() / (g1_.p() - eps));
        for (int j = 1; j <= n; ++j) {
          double eta = g2_.eps_max() * j / n;
          double lhs = pe * std::pow(eta, g2_.theta() / (g2_.p() - eta)) * outer_lebesgue_norm(c, g2_.p() - eta);
          double m = normalized_margin(lhs, w.norm.value);
          if (m < margin) {
            margin = m;
            worst = lhs;
          }
        }
      }
      out.push_back(judged("P1.chain", in, margin, {{"norm", w.norm.value}, {"worst_lhs", worst}}));
    }
  }

  void embed(std::vector<CheckReport>& out) {
    const double k = std::pow(g1_.p() - 1.0, g1_.theta()) * std::pow(g2_.p() - 1.0, g2_.theta());
    for (const auto& [name, f] : cfg_.functions) {
      json in = base_inputs(name, f);
      double lhs = norm_w(f).norm.value;
      double classical;
      try {
        classical = classical_w(f, g1_.p(), g2_.p(), q_).norm.value;
      } catch (const Error& e) {
        out.push_back(judged("P1.embed", in, std::numeric_limits<double>::quiet_NaN(), {{"lhs", lhs}}, e.what()));
        continue;
      }
      out.push_back(inequality("P1.embed", in, lhs, k * classical, {{"classical_norm", classical}}));
    }
  }

  void solid_bound(std::vector<CheckReport>& out) {
    const double unit = unit_outer_norm(g2_, q_);
    for (const auto& [name, f] : cfg_.functions) {
      double grand = grand_norm(f, g1_, omega_.domain(), opt_.inner).value;
      out.push_back(inequality("P1.solid", base_inputs(name, f), norm_w(f).norm.value, grand * unit,
                               {{"grand_norm", grand}, {"unit_outer_norm", unit}}));
    }
  }

  void exponent_mono(std::vector<CheckReport>& out) {
    GrandExponent a(1.0 + 0.5 * g1_.eps_max(), g1_.theta()), b(1.0 + 0.5 * g2_.eps_max(), g2_.theta());
    for (const auto& [name, f] : cfg_.functions) {
      json in = base_inputs(name, f);
      in["smaller_g1"] = exps(a);
      in["smaller_g2"] = exps(b);
      double big = norm_w(f).norm.value;
      if (!std::isfinite(big)) {
        out.push_back(judged("P23.mono", in, std::numeric_limits<double>::quiet_NaN(), {{"norm", big}}, "larger-exponent norm is +inf"));
        continue;
      }
      double small = grand_w(f, a, b, q_).norm.value;
      double constant = big > 0.0 ? small / big : 0.0;
      out.push_back(judged("P23.mono", in, std::isfinite(small) ? 0.0 : -1.0,
                           {{"norm", big}, {"smaller_exponent_norm", small}, {"empirical_constant", constant}}));
    }
  }

  void product(std::vector<CheckReport>& out) {
    const double p3 = g1_.p(), q3 = g2_.p();
    const auto& fs = cfg_.functions;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& a = fs[i];
      const auto& b = fs[(i + 1) % fs.size()];
      if (!bounded(a.expr) || !bounded(b.expr)) continue;
      json in = base_inputs(a.name, a.expr);
      in["other"] = b.name;
      in["other_expr"] = to_json(b.expr);
      in["exponents"] = {{"inner", {2 * p3, 2 * p3, p3}}, {"outer", {2 * q3, 2 * q3, q3}}};
      double lhs = classical_w(a.expr * b.expr, p3, q3, q_).norm.value;
      double rhs = classical_w(a.expr, 2 * p3, 2 * q3, q_).norm.value * classical_w(b.expr, 2 * p3, 2 * q3, q_).norm.value;
      out.push_back(inequality("P4.product", in, lhs, rhs));
    }
  }

  void diagonal(std::vector<CheckReport>& out) {
    for (const auto& [p, theta] : cfg_.diagonal) {
      GrandExponent g(p, theta);
      double bound = unit_outer_norm(g, q_);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      int used = 0;
      for (const auto& [name, f] : cfg_.functions) {
        double den = grand_norm(f, g, omega_.domain(), opt_.inner).value;
        if (den == 0.0 || !std::isfinite(den)) continue;
        double num = grand_w(f, g, g, q_).norm.value;
        if (!std::isfinite(num)) continue;
        double r = num / den;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++used;
      }
      json in = {{"g", exps(g)}, {"window", win(q_)}, {"omega", {omega_.lower(), omega_.upper()}},
                 {"x_domain", to_string(cfg_.x_domain)}, {"functions", cfg_.functions.size()}};
      if (used == 0) {
        out.push_back(judged("P5.diag", in, std::numeric_limits<double>::quiet_NaN(), {}, "no function with finite nonzero norm"));
        continue;
      }
      double margin = std::min(normalized_margin(hi, bound), (10.0 - hi / lo) / 10.0);
      out.push_back(judged("P5.diag", in, margin,
                           {{"r_lo", lo}, {"r_hi", hi}, {"spread", hi / lo}, {"bound", bound}, {"functions_used", double(used)}}));
    }
  }

  void window_ratio(std::vector<CheckReport>& out) {
    GrandExponent g2_flat(g2_.p(), 0.0);
    const double len = omega_.mass();
    std::vector<Window> ws = {Window(0.0, 0.25 * len), Window(0.0, 0.5 * len), Window(0.0, len)};
    for (const auto& [name, f] : cfg_.functions) {
      json in = base_inputs(name, f);
      in["g2"] = exps(g2_flat);
      in["windows"] = {win(ws[0]), win(ws[1]), win(ws[2])};
      std::vector<std::pair<std::string, double>> qs;
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      bool finite = true;
      for (const auto& w : ws) {
        double v = grand_w(f, g1_, g2_flat, w).norm.value;
        qs.push_back({"width_" + json(w.width()).dump(), v});
        finite = finite && std::isfinite(v);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!finite) {
        out.push_back(judged("T2.window", in, std::numeric_limits<double>::quiet_NaN(), qs, "a norm is +inf"));
        continue;
      }
      double spread = hi == 0.0 ? 1.0 : hi / lo;
      qs.push_back({"spread", spread});
      out.push_back(judged("T2.window", in, (10.0 - spread) / 10.0, qs));
    }
  }

  // --- duality ---

  struct ProbeData {
    std::vector<Expr> probes;
    std::vector<double> norms;
  };

  const ProbeData& probes() {
    std::call_once(probe_once_, [&] {
      probe_data_.probes = default_probes(omega_, g1_.p());
      for (const auto& f : probe_data_.probes) probe_data_.norms.push_back(norm_w(f).norm.value);
    });
    return probe_data_;
  }

  const AmalgamOutcome& dual_w(const Expr& g) {
    json key = {{"dual", to_json(g)}, {"g1", exps(g1_)}, {"g2", exps(g2_)}, {"q", win(q_)}};
    return memo(key, [&] { return dual_amalgam_upper(g, g1_, g2_, q_, omega_, opt_); });
  }

  void holder(std::vector<CheckReport>& out) {
    const ProbeData& pd = probes();
    for (const auto& [name, g] : cfg_.functions) {
      if (!bounded(g)) continue;
      double right = dual_w(g).norm.value;
      for (std::size_t i = 0; i < pd.probes.size(); ++i) {
        json in = base_inputs(name, g);
        in["probe"] = to_json(pd.probes[i]);
        double integral = pairing_integral(pd.probes[i], g, omega_, opt_.inner.quadrature);
        double left = pd.norms[i];
        double prod = (left == 0.0 || right == 0.0) ? 0.0 : left * right;
        CheckReport r = inequality("T7.holder", in, integral, prod, {{"integral", integral}, {"left", left}, {"right", right}});
        r.pairing = PairingReport{integral, left, right, prod - integral};
        out.push_back(std::move(r));
      }
    }
  }

  void sandwich(std::vector<CheckReport>& out) {
    const ProbeData& pd = probes();
    for (const auto& [name, g] : cfg_.functions) {
      if (!bounded(g)) continue;
      double lower = 0.0;
      for (std::size_t i = 0; i < pd.probes.size(); ++i) {
        if (pd.norms[i] == 0.0 || !std::isfinite(pd.norms[i])) continue;
        lower = std::max(lower, pairing_integral(pd.probes[i], g, omega_, opt_.inner.quadrature) / pd.norms[i]);
      }
      out.push_back(inequality("D2.sandwich", base_inputs(name, g), lower, dual_w(g).norm.value));
    }
  }

  // --- density and absolute continuity ---

  json density_inputs(const std::string& name, const Expr& f) const {
    json in = base_inputs(name, f);
    in["window"] = win(witness_);
    in["eps"] = detail::doubles(cfg_.vanish_eps);
    return in;
  }

  std::vector<std::pair<double, double>> v_of(const Expr& f) {
    std::vector<double> eps = cfg_.vanish_eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    std::vector<std::pair<double, double>> out;
    for (double e : eps) {
      double n = classical_w(f, g1_.p() - e, g2_.p() - e, witness_).norm.value;
      double pre = g1_.theta() == 0.0 ? 1.0 : std::pow(e, g1_.theta() / (g1_.p() - e));
      out.push_back({e, n == 0.0 ? 0.0 : pre * n});
    }
    return out;
  }

  static std::vector<std::pair<std::string, double>> v_quantities(const std::vector<std::pair<double, double>>& v) {
    std::vector<std::pair<std::string, double>> qs;
    for (const auto& [e, x] : v) qs.push_back({"V_" + json(e).dump(), x});
    return qs;
  }

  void vanish(std::vector<CheckReport>& out) {
    for (const auto& [name, f] : cfg_.functions) {
      if (!bounded(f)) continue;
      auto v = v_of(f);
      double last = v.back().second;
      out.push_back(judged("P6.vanish", density_inputs(name, f), 1e-2 - last, v_quantities(v)));
    }
  }

  void nondense(std::vector<CheckReport>& out) {
    Expr f = singular_witness(omega_, g1_.p());
    auto v = v_of(f);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& [e, x] : v) lo = std::min(lo, x);
    out.push_back(judged("P7.nondense", density_inputs("singular_witness", f), lo - 0.5, v_quantities(v)));
  }

  void acn(std::vector<CheckReport>& out) {
    auto tail_quantities = [](const std::vector<std::pair<double, double>>& t) {
      std::vector<std::pair<std::string, double>> qs;
      for (const auto& [a, x] : t) qs.push_back({"T_" + json(a).dump(), x});
      return qs;
    };
    auto inputs = [&](const std::string& name, const Expr& f) {
      json in = base_inputs(name, f);
      in.erase("window");
      in["a"] = detail::doubles(cfg_.acn_a);
      return in;
    };
    if (cfg_.acn_a.empty()) return;
    Expr s = singular_witness(omega_, g1_.p());
    auto ts = acn_tail(s, g1_, g2_, omega_, cfg_.acn_a, opt_);
    double threshold = 0.25 * std::pow(g1_.p() - 1.0, g1_.theta() - 1.0) * g1_.p() * std::pow(g2_.p() - 1.0, g2_.theta());
    double tmin = std::numeric_limits<double>::infinity();
    for (const auto& [a, t] : ts) tmin = std::min(tmin, t);
    auto qs = tail_quantities(ts);
    qs.push_back({"threshold", threshold});
    out.push_back(judged("T10.acn", inputs("singular_witness", s), normalized_margin(threshold, tmin), qs,
                         "non-ACN witness: min T(a) must reach the threshold"));
    Expr one = Expr::constant(1.0);
    auto tc = acn_tail(one, g1_, g2_, omega_, cfg_.acn_a, opt_);
    double first = tc.front().second, last = tc.back().second;
    out.push_back(judged("T10.acn", inputs("one", one), 1e-2 * first - last, tail_quantities(tc),
                         "ACN-consistent: T(a_min) must fall below 1e-2 T(a_max)"));
  }

  ExperimentConfig cfg_;
  MeasureSpace omega_;
  GrandExponent g1_, g2_;
  Window q_, witness_;
  AmalgamOptions opt_;
  int jobs_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<AmalgamOutcome>> memo_;
  std::once_flag probe_once_;
  ProbeData probe_data_;
};

inline std::vector<CheckReport> run_verify(const ExperimentConfig& cfg, const std::vector<std::string>& filter, int jobs = 1) {
  VerifySuite suite(cfg, jobs);
  return suite.run(filter);
}

}  // namespace grandamalgam
