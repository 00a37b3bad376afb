#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "error.hpp"
#include "expr.hpp"
#include "extremize.hpp"
#include "grand_norm.hpp"
#include "interval.hpp"
#include "outcome.hpp"
#include "parallel.hpp"

namespace grandamalgam {

// Q = [offset, offset + width); Q + x is clipped to the measure space before use.
class Window {
 public:
  Window(double offset, double width) : offset_(offset), width_(width) {
    if (!std::isfinite(offset) || !std::isfinite(width) || !(width > 0.0))
      throw Error(ErrorKind::invalid_argument, "window needs finite offset and width > 0");
  }

  double offset() const { return offset_; }
  double width() const { return width_; }
  Interval base() const { return {offset_, offset_ + width_}; }
  Interval translate(double x) const { return {offset_ + x, offset_ + x + width_}; }
  Interval at(double x, const MeasureSpace& omega) const { return translate(x).intersect(omega.domain()); }

  bool operator==(const Window&) const = default;

 private:
  double offset_;
  double width_;
};

// Where the translation parameter x ranges: over the measure space itself, or over every x for which
// Q + x meets it.
enum class XDomain { omega, translates };

struct AmalgamOptions {
  int grid_points = 257;
  int max_grid_points = 4097;
  double outer_rel_change = 1e-6;
  bool refine = true;
  XDomain x_domain = XDomain::omega;
  int jobs = 1;
  GrandOptions inner;
};

struct CurvePiece {
  double lo, hi;
  int intervals;
};

struct ControlCurve {
  std::vector<double> x;
  std::vector<NormOutcome> samples;
  // Composite Simpson in u on each piece, with nodes x = lo + (hi - lo)(1 - cos(pi u))/2 clustered at the
  // piece ends where the control function has square-root type behavior.
  std::vector<double> weights;
  std::vector<double> coarse_weights;  // same rule on every other node
  std::vector<CurvePiece> pieces;

  std::size_t size() const { return x.size(); }
};

inline Interval x_domain_of(const Window& q, const MeasureSpace& omega, XDomain d) {
  if (d == XDomain::omega) return omega.domain();
  return {omega.lower() - q.offset() - q.width(), omega.upper() - q.offset()};
}

// Piece boundaries of the x-range on which the control function can be nonzero, split wherever a
// window edge crosses an edge of the space, of the support, or a breakpoint of f.
inline std::vector<double> control_cuts(const Expr& f, const Window& q, const MeasureSpace& omega, XDomain d) {
  Interval hull = support_hull(f).intersect(omega.domain());
  if (hull.empty()) return {};
  Interval xs = x_domain_of(q, omega, d).intersect({hull.lo - q.offset() - q.width(), hull.hi - q.offset()});
  if (xs.empty()) return {};
  std::vector<double> marks{omega.lower(), omega.upper(), hull.lo, hull.hi};
  for (double b : breakpoints(f, omega.domain())) marks.push_back(b);
  for (double c : special_points(f))
    if (omega.domain().contains(c)) marks.push_back(c);
  std::vector<double> cuts{xs.lo, xs.hi};
  for (double b : marks)
    for (double x : {b - q.offset(), b - q.offset() - q.width()})
      if (x > xs.lo && x < xs.hi) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> out;
  for (double c : cuts)
    if (out.empty() || c - out.back() > 1e-12 * std::max(1.0, std::fabs(c))) out.push_back(c);
  if (out.size() == 1) return {};
  out.back() = xs.hi;
  return out;
}

inline std::vector<CurvePiece> allocate_pieces(const std::vector<double>& cuts, int grid_points) {
  if (grid_points < 33 || grid_points % 2 == 0)
    throw Error(ErrorKind::invalid_argument, "grid size must be odd and >= 33");
  std::vector<CurvePiece> out;
  if (cuts.size() < 2) return out;
  const double total = cuts.back() - cuts.front();
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double len = cuts[i + 1] - cuts[i];
    int n = 4 * static_cast<int>(std::ceil((grid_points - 1) * len / (4.0 * total)));
    out.push_back({cuts[i], cuts[i + 1], std::max(8, n)});
  }
  return out;
}

inline int grid_size(const std::vector<CurvePiece>& pieces) {
  int n = 1;
  for (const auto& p : pieces) n += p.intervals;
  return pieces.empty() ? 0 : n;
}

namespace detail {

inline double piece_node(const CurvePiece& p, int k) {
  if (k == 0) return p.lo;
  if (k == p.intervals) return p.hi;
  double u = static_cast<double>(k) / p.intervals;
  double s = std::sin(0.5 * std::numbers::pi * u);
  return p.lo + (p.hi - p.lo) * s * s;
}

inline void simpson_into(std::vector<double>& w, std::size_t base, const CurvePiece& p, int n, int stride) {
  const double h = 1.0 / n, jac = 0.5 * std::numbers::pi * (p.hi - p.lo);
  for (int k = 1; k < n; ++k) {
    double c = k % 2 == 1 ? 4.0 : 2.0;
    w[base + static_cast<std::size_t>(k) * stride] += h / 3.0 * c * jac * std::sin(std::numbers::pi * k * h);
  }
}

}  // namespace detail

// Samples `sampler(window)` on the grid given by `pieces`.  Nodes shared with `previous` (same pieces at
// half resolution) are copied rather than recomputed.
template <class Sampler>
ControlCurve sample_curve(const std::vector<CurvePiece>& pieces, const Window& q, const MeasureSpace& omega,
                          Sampler&& sampler, int jobs, const ControlCurve* previous = nullptr) {
  ControlCurve c;
  c.pieces = pieces;
  const int m = grid_size(pieces);
  if (m == 0) return c;
  c.x.resize(m);
  c.samples.resize(m);
  c.weights.assign(m, 0.0);
  c.coarse_weights.assign(m, 0.0);
  std::vector<int> reuse(m, -1);
  std::size_t base = 0, prev_base = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    for (int k = 0; k <= p.intervals; ++k) {
      c.x[base + k] = detail::piece_node(p, k);
      if (previous && k % 2 == 0) reuse[base + k] = static_cast<int>(prev_base + k / 2);
    }
    detail::simpson_into(c.weights, base, p, p.intervals, 1);
    detail::simpson_into(c.coarse_weights, base, p, p.intervals / 2, 2);
    base += p.intervals;
    if (previous) prev_base += previous->pieces[i].intervals;
  }
  std::vector<std::size_t> todo;
  for (int i = 0; i < m; ++i) {
    if (reuse[i] >= 0) {
      c.samples[i] = previous->samples[reuse[i]];
    } else {
      todo.push_back(i);
    }
  }
  parallel_for(todo.size(), jobs, [&](std::size_t j) {
    std::size_t i = todo[j];
    Interval w = q.at(c.x[i], omega);
    c.samples[i] = w.empty() ? NormOutcome{} : sampler(w);
  });
  return c;
}

// J(r) = Σ w_i F_i^r on a sampled curve.
class CurveIntegral {
 public:
  CurveIntegral(const ControlCurve& c, bool coarse = false)
      : w_(coarse ? c.coarse_weights : c.weights), f_(c.samples.size()) {
    for (std::size_t i = 0; i < f_.size(); ++i) f_[i] = c.samples[i].value;
    for (std::size_t i = 0; i < f_.size(); ++i) {
      if (!std::isinf(f_[i])) continue;
      bool left = i > 0 && std::isinf(f_[i - 1]);
      bool right = i + 1 < f_.size() && std::isinf(f_[i + 1]);
      if (left || right) {
        infinite_ = true;
      } else {
        isolated_ = true;
      }
    }
    if (isolated_ && !infinite_)
      throw Error(ErrorKind::unresolved_singularity,
                  "control function is infinite at an isolated sample; the outer integral is not resolved");
    for (std::size_t i = 0; i < f_.size(); ++i) {
      max_ = std::max(max_, f_[i]);
      if (f_[i] > 0.0 && w_[i] > 0.0) {
        logf_.push_back(std::log(f_[i]));
        logw_.push_back(std::log(w_[i]));
      }
    }
  }

  bool infinite() const { return infinite_; }
  double max_sample() const { return max_; }

  double operator()(double r) const {
    if (infinite_) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < logf_.size(); ++i) s += std::exp(r * logf_[i] + logw_[i]);
    return s;
  }

  double rnorm(double r) const {
    if (infinite_) return std::numeric_limits<double>::infinity();
    if (std::isinf(r)) return max_;
    double s = (*this)(r);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / r);
  }

 private:
  const std::vector<double>& w_;
  std::vector<double> f_;
  std::vector<double> logf_, logw_;
  double max_ = 0.0;
  bool infinite_ = false;
  bool isolated_ = false;
};

inline NormOutcome outer_grand_norm(const ControlCurve& c, const GrandExponent& g, const GrandOptions& opt = {}) {
  if (c.samples.empty()) return {0.0, std::nullopt, 0.0, EvaluationPath::quadrature};
  CurveIntegral fine(c), coarse(c, true);
  if (fine.infinite()) return NormOutcome::infinite(EvaluationPath::quadrature);
  NormOutcome out;
  out.path = EvaluationPath::quadrature;
  double r_at;
  if (g.theta() == 0.0) {
    out.value = fine.rnorm(g.p());
    r_at = g.p();
  } else {
    auto fn = [&](double eta) {
      double r = g.p() - eta;
      return detail::weighted_root(g.theta(), eta, fine(r), r);
    };
    ScanResult s = scan_maximum(fn, detail::eps_min(g, opt), g.eps_max(), opt.scan());
    out.value = s.value;
    out.argmax_eps = s.arg;
    r_at = g.p() - s.arg;
  }
  double jf = fine(r_at), jc = coarse(r_at);
  if (jf > 0.0) out.error_estimate = out.value * std::fabs(jf - jc) / 15.0 / jf / r_at;
  return out;
}

inline double outer_lebesgue_norm(const ControlCurve& c, double r) {
  if (c.samples.empty()) return 0.0;
  return CurveIntegral(c).rnorm(r);
}

struct AmalgamOutcome {
  NormOutcome norm;
  ControlCurve curve;
  bool converged = false;
};

// Grid refinement loop shared by every amalgam-type norm.
template <class Sampler, class Outer>
AmalgamOutcome refine_amalgam(const std::vector<double>& cuts, const Window& q, const MeasureSpace& omega,
                              Sampler&& sampler, Outer&& outer, const AmalgamOptions& opt) {
  AmalgamOutcome res;
  auto pieces = allocate_pieces(cuts, opt.grid_points);
  if (pieces.empty()) {
    res.norm = {0.0, std::nullopt, 0.0, EvaluationPath::quadrature};
    res.converged = true;
    return res;
  }
  res.curve = sample_curve(pieces, q, omega, sampler, opt.jobs);
  res.norm = outer(res.curve);
  double change = 0.0;
  while (opt.refine && res.norm.finite() && res.norm.value > 0.0) {
    auto next = res.curve.pieces;
    for (auto& p : next) p.intervals *= 2;
    if (grid_size(next) > opt.max_grid_points) break;
    ControlCurve finer = sample_curve(next, q, omega, sampler, opt.jobs, &res.curve);
    NormOutcome v = outer(finer);
    change = std::fabs(v.value - res.norm.value) / std::max(std::fabs(v.value), std::numeric_limits<double>::min());
    res.curve = std::move(finer);
    res.norm = v;
    if (!v.finite() || change < opt.outer_rel_change) {
      res.converged = true;
      break;
    }
  }
  if (!opt.refine || !res.norm.finite() || res.norm.value == 0.0) res.converged = true;
  if (res.norm.finite()) res.norm.error_estimate = std::max(res.norm.error_estimate, change * res.norm.value);
  return res;
}

inline AmalgamOutcome amalgam_norm(const Expr& f, const GrandExponent& g1, const GrandExponent& g2, const Window& q,
                                   const MeasureSpace& omega, const AmalgamOptions& opt = {}) {
  validate_on(f, omega.domain());
  auto sampler = [&](const Interval& w) { return grand_norm(f, g1, w, opt.inner); };
  auto outer = [&](const ControlCurve& c) { return outer_grand_norm(c, g2, opt.inner); };
  return refine_amalgam(control_cuts(f, q, omega, opt.x_domain), q, omega, sampler, outer, opt);
}

// Classical W(L^{r_in}, L^{r_out}); either exponent may be +inf.
inline AmalgamOutcome lebesgue_amalgam_norm(const Expr& f, double r_in, double r_out, const Window& q,
                                            const MeasureSpace& omega, const AmalgamOptions& opt = {}) {
  validate_on(f, omega.domain());
  auto sampler = [&](const Interval& w) { return lebesgue_norm(f, r_in, w, opt.inner); };
  auto outer = [&](const ControlCurve& c) {
    return NormOutcome{outer_lebesgue_norm(c, r_out), std::nullopt, 0.0, EvaluationPath::quadrature};
  };
  return refine_amalgam(control_cuts(f, q, omega, opt.x_domain), q, omega, sampler, outer, opt);
}

// Classical control curve F(x) = ‖f χ_{Q+x}‖_{r_in} on the grid of an existing curve.
inline ControlCurve lebesgue_control_on(const ControlCurve& like, const Expr& f, double r_in, const Window& q,
                                        const MeasureSpace& omega, const AmalgamOptions& opt = {}) {
  auto sampler = [&](const Interval& w) { return lebesgue_norm(f, r_in, w, opt.inner); };
  return sample_curve(like.pieces, q, omega, sampler, opt.jobs);
}

inline ControlCurve control_curve(const Expr& f, const GrandExponent& g1, const Window& q, const MeasureSpace& omega,
                                  int grid_points, const AmalgamOptions& opt = {}) {
  validate_on(f, omega.domain());
  auto pieces = allocate_pieces(control_cuts(f, q, omega, opt.x_domain), grid_points);
  auto sampler = [&](const Interval& w) { return grand_norm(f, g1, w, opt.inner); };
  return sample_curve(pieces, q, omega, sampler, opt.jobs);
}

// amalgam norm over grand norm on the whole space; nullopt when the denominator vanishes.
inline std::optional<double> diagonal_ratio(const Expr& f, const GrandExponent& g, const Window& q,
                                            const MeasureSpace& omega, const AmalgamOptions& opt = {}) {
  NormOutcome den = grand_norm(f, g, omega.domain(), opt.inner);
  if (den.value == 0.0) return std::nullopt;
  if (!den.finite()) throw Error(ErrorKind::invalid_argument, "diagonal ratio needs a finite grand norm");
  return amalgam_norm(f, g, g, q, omega, opt).norm.value / den.value;
}

}  // namespace grandamalgam
