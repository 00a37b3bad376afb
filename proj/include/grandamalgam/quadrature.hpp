#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "expr.hpp"
#include "interval.hpp"

namespace grandamalgam {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  int max_panels = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
};

namespace gk15 {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule {
  std::array<double, 15> x{}, wk{}, wg{};
};

inline const Rule& rule() {
  static const Rule r = [] {
    Rule q;
    for (int i = 0; i < 7; ++i) {
      q.x[i] = -xgk[i];
      q.x[14 - i] = xgk[i];
      q.wk[i] = q.wk[14 - i] = wgk[i];
      double g = (i % 2 == 1) ? wg[i / 2] : 0.0;
      q.wg[i] = q.wg[14 - i] = g;
    }
    q.x[7] = 0.0;
    q.wk[7] = wgk[7];
    q.wg[7] = wg[3];
    return q;
  }();
  return r;
}

}  // namespace gk15

// Adaptive Gauss-Kronrod mesh for r -> ∫_window |f|^r, built once for a set of probe exponents and
// then reusable for any r in their range.  Panels next to a singular point use t = c ± e^u, and the
// innermost piece [c, c+tau] is integrated from the leading asymptotic term.
class PowerMeanProfile {
 public:
  PowerMeanProfile(const Expr& f, const Interval& window, const std::vector<double>& probes,
                   const QuadratureOptions& opts = {})
      : f_(f), opts_(opts) {
    if (!(opts.rel_tol > 0.0) || opts.rel_tol > 1e-2)
      throw Error(ErrorKind::invalid_argument, "rel_tol must lie in (0, 1e-2]");
    window_ = window.intersect(support_hull(f));
    if (window_.empty()) return;
    collect_singular_sides();
    for (double r : probes)
      if (!divergent(r)) probes_.push_back(r);
    if (probes_.empty()) return;
    build_segments();
    refine();
  }

  bool divergent(double r) const {
    for (const auto& s : sides_)
      if (s.asym.exponent * r <= -1.0) return true;
    return false;
  }

  QuadratureResult integrate(double r) const {
    QuadratureResult out;
    out.subdivisions = static_cast<int>(panels_.size());
    if (window_.empty()) return out;
    if (divergent(r)) {
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    for (const auto& p : panels_) {
      auto [k, e] = panel_estimate(p, r);
      out.value += k;
      out.abs_error += e;
    }
    for (const auto& t : tails_) {
      double v = tail_value(t, r);
      out.value += v;
      out.abs_error += v * 1e-13;
    }
    return out;
  }

  int panels() const { return static_cast<int>(panels_.size()); }

 private:
  enum class Map { linear, log_left, log_right };

  struct Panel {
    double u0, u1;
    Map map;
    double anchor;
    std::array<double, 15> log_f;
    std::array<double, 15> log_jac;
  };

  struct Tail {
    Asymptote asym;
    double tau;
  };

  struct SingularSide {
    double point;
    int side;
    Asymptote asym;
  };

  void collect_singular_sides() {
    std::vector<double> pts = special_points(f_);
    pts.push_back(window_.lo);
    pts.push_back(window_.hi);
    for (double c : pts) {
      if (!window_.contains(c)) continue;
      for (int side : {+1, -1}) {
        if ((side > 0 && c >= window_.hi) || (side < 0 && c <= window_.lo)) continue;
        Asymptote a = leading_term(f_, c, side);
        if (!a.vanishes && a.exponent < 0.0) sides_.push_back({c, side, a});
      }
    }
    specials_ = special_points(f_);
  }

  void build_segments() {
    std::vector<double> cuts{window_.lo};
    for (double b : breakpoints(f_, window_)) cuts.push_back(b);
    cuts.push_back(window_.hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) add_segment(cuts[i], cuts[i + 1]);
  }

  void add_segment(double s0, double s1) {
    if (!(s1 > s0)) return;
    double len = s1 - s0;
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = std::numeric_limits<double>::quiet_NaN();
    for (double c : specials_) {
      if (c <= s0 && s0 - c < 0.5 * len) left = c;
      if (c >= s1 && c - s1 < 0.5 * len && std::isnan(right)) right = c;
    }
    if (!std::isnan(left) && !std::isnan(right)) {
      double m = s0 + 0.5 * len;
      add_log_segment(s0, m, left, +1);
      add_log_segment(m, s1, right, -1);
    } else if (!std::isnan(left)) {
      add_log_segment(s0, s1, left, +1);
    } else if (!std::isnan(right)) {
      add_log_segment(s0, s1, right, -1);
    } else {
      push_panel(s0, s1, Map::linear, 0.0);
    }
  }

  // Distances from c to the segment are [d_near, d_far]; d_near == 0 triggers the analytic tail.
  void add_log_segment(double s0, double s1, double c, int side) {
    double d_near = side > 0 ? s0 - c : c - s1;
    double d_far = side > 0 ? s1 - c : c - s0;
    if (d_near == 0.0) {
      Asymptote a = leading_term(f_, c, side);
      if (a.vanishes) {
        d_near = d_far * 1e-12;
      } else {
        double tau = choose_tau(c, side, a, d_far);
        tails_.push_back({a, tau});
        d_near = tau;
      }
    }
    double u0 = std::log(d_near), u1 = std::log(d_far);
    int chunks = std::max(1, static_cast<int>(std::ceil((u1 - u0) / 2.0)));
    Map map = side > 0 ? Map::log_left : Map::log_right;
    for (int k = 0; k < chunks; ++k) {
      double a = u0 + (u1 - u0) * k / chunks;
      double b = k + 1 == chunks ? u1 : u0 + (u1 - u0) * (k + 1) / chunks;
      push_panel(a, b, map, c);
    }
  }

  double log_abs_at(double c, int side, double s) const {
    return std::log(std::fabs(evaluate(f_, Point{c, side * s})));
  }

  double choose_tau(double c, int side, const Asymptote& a, double len) const {
    auto deviation = [&](double s) {
      return std::fabs(log_abs_at(c, side, s) - (std::log(std::fabs(a.coeff)) + a.exponent * std::log(s)));
    };
    double tau = len * 1e-3;
    while (tau > 1e-280) {
      double d1 = deviation(tau), d2 = deviation(tau * 1e-3);
      if (d1 < 1e-13 && d2 < 1e-13) return tau;
      tau *= 1e-3;
    }
    return tau;
  }

  void push_panel(double u0, double u1, Map map, double anchor) {
    panels_.push_back(make_panel(u0, u1, map, anchor));
  }

  Panel make_panel(double u0, double u1, Map map, double anchor) const {
    Panel p{u0, u1, map, anchor, {}, {}};
    const auto& q = gk15::rule();
    double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
    for (int i = 0; i < 15; ++i) {
      double u = mid + half * q.x[i];
      Point pt;
      double lj = 0.0;
      if (map == Map::linear) {
        pt = {u, 0.0};
      } else {
        double s = std::exp(u);
        pt = {anchor, map == Map::log_left ? s : -s};
        lj = u;
      }
      p.log_f[i] = std::log(std::fabs(evaluate(f_, pt)));
      p.log_jac[i] = lj;
    }
    return p;
  }

  // QUADPACK-style (value, error) for one panel.
  static std::pair<double, double> panel_estimate(const Panel& p, double r) {
    const auto& q = gk15::rule();
    double half = 0.5 * (p.u1 - p.u0);
    std::array<double, 15> g;
    double k = 0.0, gs = 0.0;
    for (int i = 0; i < 15; ++i) {
      g[i] = p.log_f[i] == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(r * p.log_f[i] + p.log_jac[i]);
      k += q.wk[i] * g[i];
      gs += q.wg[i] * g[i];
    }
    double mean = 0.5 * k;
    double asc = 0.0;
    for (int i = 0; i < 15; ++i) asc += q.wk[i] * std::fabs(g[i] - mean);
    asc *= half;
    double value = k * half;
    double err = std::fabs((k - gs) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    double eps = std::numeric_limits<double>::epsilon();
    if (value > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * value, err);
    return {value, err};
  }

  static double tail_value(const Tail& t, double r) {
    double s = t.asym.exponent * r + 1.0;
    return std::exp(r * std::log(std::fabs(t.asym.coeff)) + s * std::log(t.tau)) / s;
  }

  void refine() {
    const std::size_t np = probes_.size();
    std::vector<std::vector<double>> val(np), err(np);
    auto fill = [&](std::size_t idx) {
      for (std::size_t j = 0; j < np; ++j) {
        auto [v, e] = panel_estimate(panels_[idx], probes_[j]);
        if (val[j].size() <= idx) {
          val[j].resize(idx + 1);
          err[j].resize(idx + 1);
        }
        val[j][idx] = v;
        err[j][idx] = e;
      }
    };
    for (std::size_t i = 0; i < panels_.size(); ++i) fill(i);
    while (true) {
      std::vector<double> tol(np);
      bool done = true;
      for (std::size_t j = 0; j < np; ++j) {
        double total = 0.0, total_err = 0.0;
        for (std::size_t i = 0; i < panels_.size(); ++i) {
          total += val[j][i];
          total_err += err[j][i];
        }
        for (const auto& t : tails_) total += tail_value(t, probes_[j]);
        tol[j] = std::max(opts_.rel_tol * std::fabs(total), std::numeric_limits<double>::min());
        if (total_err > tol[j]) done = false;
      }
      if (done) return;
      if (static_cast<int>(panels_.size()) >= opts_.max_panels)
        throw Error(ErrorKind::tolerance_not_met,
                    "subdivision cap of " + std::to_string(opts_.max_panels) + " panels reached");
      std::size_t worst = 0;
      double worst_score = -1.0;
      for (std::size_t i = 0; i < panels_.size(); ++i) {
        double score = 0.0;
        for (std::size_t j = 0; j < np; ++j) score = std::max(score, err[j][i] / tol[j]);
        if (score > worst_score) {
          worst_score = score;
          worst = i;
        }
      }
      Panel old = panels_[worst];
      double mid = 0.5 * (old.u0 + old.u1);
      panels_[worst] = make_panel(old.u0, mid, old.map, old.anchor);
      panels_.push_back(make_panel(mid, old.u1, old.map, old.anchor));
      fill(worst);
      fill(panels_.size() - 1);
    }
  }

  Expr f_;
  QuadratureOptions opts_;
  Interval window_;
  std::vector<double> probes_;
  std::vector<double> specials_;
  std::vector<SingularSide> sides_;
  std::vector<Panel> panels_;
  std::vector<Tail> tails_;
};

// Smallest r at which ∫_window |f|^r diverges (+inf when it never does).
inline double divergence_threshold(const Expr& f, const Interval& window) {
  Interval w = window.intersect(support_hull(f));
  double out = std::numeric_limits<double>::infinity();
  if (w.empty()) return out;
  std::vector<double> pts = special_points(f);
  pts.push_back(w.lo);
  pts.push_back(w.hi);
  for (double c : pts) {
    if (!w.contains(c)) continue;
    for (int side : {+1, -1}) {
      if ((side > 0 && c >= w.hi) || (side < 0 && c <= w.lo)) continue;
      Asymptote a = leading_term(f, c, side);
      if (!a.vanishes && a.exponent < 0.0) out = std::min(out, -1.0 / a.exponent);
    }
  }
  return out;
}

inline QuadratureResult integrate_power_mean(const Expr& f, double r, const Interval& window,
                                             double rel_tol = 1e-9, int max_panels = 2000) {
  if (!(r >= 1.0)) throw Error(ErrorKind::invalid_argument, "integrate_power_mean needs r >= 1");
  if (window.empty()) throw Error(ErrorKind::invalid_argument, "empty integration window");
  PowerMeanProfile prof(f, window, {r}, {rel_tol, max_panels});
  if (prof.divergent(r)) throw Error(ErrorKind::divergent_integral, "singular exponent times r is <= -1");
  return prof.integrate(r);
}

}  // namespace grandamalgam
