#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "closed_form.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "extremize.hpp"
#include "interval.hpp"
#include "outcome.hpp"
#include "quadrature.hpp"

namespace grandamalgam {

class GrandExponent {
 public:
  GrandExponent(double p, double theta) : p_(p), theta_(theta) {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::invalid_argument, "grand exponent needs 1 < p < inf");
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw Error(ErrorKind::invalid_argument, "theta must be >= 0");
  }

  double p() const { return p_; }
  double theta() const { return theta_; }
  double eps_max() const { return p_ - 1.0; }
  double conjugate() const { return conjugate_of(p_); }
  // (p - eps)'; +inf at eps = p - 1
  double conjugate_at(double eps) const { return conjugate_of(p_ - eps); }

  static double conjugate_of(double r) {
    if (!(r >= 1.0)) throw Error(ErrorKind::invalid_argument, "conjugate exponent needs r >= 1");
    if (r == 1.0) return std::numeric_limits<double>::infinity();
    return r / (r - 1.0);
  }

  bool operator==(const GrandExponent&) const = default;

 private:
  double p_;
  double theta_;
};

struct GrandOptions {
  int eps_points = 200;
  double eps_min_fraction = 1e-6;
  double eps_resolution = 1e-8;
  int max_refined_peaks = 8;
  double r_cap = 64.0;
  bool force_quadrature = false;
  bool keep_probes = false;
  QuadratureOptions quadrature;

  ScanOptions scan() const { return {eps_points, eps_resolution, max_refined_peaks, keep_probes}; }
};

// r -> ∫_window |f|^r on [r_lo, r_hi], by monomial closed form or a shared quadrature profile.
class PowerMean {
 public:
  PowerMean(const Expr& f, const Interval& window, double r_lo, double r_hi, const GrandOptions& opt)
      : window_(window) {
    if (!opt.force_quadrature) mono_ = monomial_form(f);
    if (mono_) return;
    double cut = divergence_threshold(f, window);
    double top = r_hi < cut ? r_hi : std::max(r_lo, cut * (1.0 - 1e-6));
    std::vector<double> probes;
    if (r_lo < cut) probes.push_back(r_lo);
    if (top > r_lo && top < cut) {
      probes.push_back(0.5 * (r_lo + top));
      probes.push_back(top);
    }
    profile_.emplace(f, window, probes, opt.quadrature);
  }

  double integral(double r) const {
    if (mono_) return monomial_power_integral(*mono_, r, window_);
    return profile_->integrate(r).value;
  }

  // (value, absolute error)
  std::pair<double, double> integral_with_error(double r) const {
    if (mono_) return {monomial_power_integral(*mono_, r, window_), 0.0};
    auto q = profile_->integrate(r);
    return {q.value, q.abs_error};
  }

  // (∫|f|^r)^{1/r}
  double rnorm(double r) const {
    if (mono_) return monomial_rnorm(*mono_, r, window_);
    double v = integral(r);
    if (v == 0.0 || std::isinf(v)) return v;
    return std::pow(v, 1.0 / r);
  }

  EvaluationPath path() const { return mono_ ? EvaluationPath::closed_form : EvaluationPath::quadrature; }

 private:
  Interval window_;
  std::optional<Monomial> mono_;
  std::optional<PowerMeanProfile> profile_;
};

namespace detail {

inline double weighted_root(double theta, double eps, double integral, double r) {
  if (integral == 0.0) return 0.0;
  if (std::isinf(integral)) return integral;
  return std::exp((theta * std::log(eps) + std::log(integral)) / r);
}

inline double eps_min(const GrandExponent& g, const GrandOptions& opt) {
  return opt.eps_min_fraction * g.eps_max();
}

inline double relative_error(const std::pair<double, double>& ve) {
  return ve.first > 0.0 && std::isfinite(ve.first) ? ve.second / ve.first : 0.0;
}

}  // namespace detail

inline double phi(const Expr& f, const GrandExponent& g, const Interval& window, double eps,
                  const GrandOptions& opt = {}) {
  if (!(eps > 0.0) || eps > g.eps_max()) throw Error(ErrorKind::invalid_argument, "eps must lie in (0, p-1]");
  double r = g.p() - eps;
  PowerMean pm(f, window, r, r, opt);
  if (g.theta() == 0.0) return pm.rnorm(r);
  return detail::weighted_root(g.theta(), eps, pm.integral(r), r);
}

// ‖f χ_window‖_r; r = +inf uses the sampled supremum.
inline double sup_abs_sample(const Expr& f, const Interval& window, int samples = 2001);

inline NormOutcome lebesgue_norm(const Expr& f, double r, const Interval& window, const GrandOptions& opt = {}) {
  if (std::isinf(r)) return {sup_abs_sample(f, window), std::nullopt, 0.0, EvaluationPath::quadrature};
  PowerMean pm(f, window, r, r, opt);
  NormOutcome out{pm.rnorm(r), std::nullopt, 0.0, pm.path()};
  if (out.finite() && pm.path() == EvaluationPath::quadrature)
    out.error_estimate = out.value * detail::relative_error(pm.integral_with_error(r)) / r;
  return out;
}

inline NormOutcome grand_norm(const Expr& f, const GrandExponent& g, const Interval& window,
                              const GrandOptions& opt = {}, ScanResult* scan_out = nullptr) {
  if (window.empty()) throw Error(ErrorKind::invalid_argument, "empty window");
  if (g.theta() == 0.0) return lebesgue_norm(f, g.p(), window, opt);
  const double lo = detail::eps_min(g, opt), hi = g.eps_max();
  PowerMean pm(f, window, g.p() - hi, g.p() - lo, opt);
  auto fn = [&](double eps) {
    double r = g.p() - eps;
    return detail::weighted_root(g.theta(), eps, pm.integral(r), r);
  };
  ScanResult s = scan_maximum(fn, lo, hi, opt.scan());
  NormOutcome out;
  out.path = pm.path();
  if (s.infinite) {
    out = NormOutcome::infinite(pm.path());
  } else {
    out.value = s.value;
    out.argmax_eps = s.arg;
    if (pm.path() == EvaluationPath::quadrature && s.value > 0.0) {
      double r = g.p() - s.arg;
      out.error_estimate = s.value * detail::relative_error(pm.integral_with_error(r)) / r;
    }
  }
  if (scan_out) *scan_out = std::move(s);
  return out;
}

inline NormOutcome grand_norm(const Expr& f, const GrandExponent& g, const MeasureSpace& omega,
                              const GrandOptions& opt = {}) {
  return grand_norm(f, g, omega.domain(), opt);
}

inline NormOutcome grand_seq_norm(const std::vector<double>& u, const GrandExponent& g,
                                  const GrandOptions& opt = {}) {
  if (u.empty()) throw Error(ErrorKind::invalid_argument, "sequence must have at least one entry");
  auto sum_pow = [&](double r) {
    double s = 0.0;
    for (double v : u)
      if (v != 0.0) s += std::pow(std::fabs(v), r);
    return s;
  };
  if (g.theta() == 0.0) {
    double s = sum_pow(g.p());
    return {s == 0.0 ? 0.0 : std::pow(s, 1.0 / g.p()), std::nullopt, 0.0, EvaluationPath::closed_form};
  }
  auto fn = [&](double eps) {
    double r = g.p() - eps;
    return detail::weighted_root(g.theta(), eps, sum_pow(r), r);
  };
  ScanResult s = scan_maximum(fn, detail::eps_min(g, opt), g.eps_max(), opt.scan());
  return {s.value, s.arg, 0.0, EvaluationPath::closed_form};
}

inline double sup_abs_sample(const Expr& f, const Interval& window, int samples) {
  Interval w = window.intersect(support_hull(f));
  if (w.empty()) return 0.0;
  std::vector<double> pts;
  for (int i = 0; i < samples; ++i) pts.push_back(w.lo + (w.hi - w.lo) * i / (samples - 1));
  for (double b : breakpoints(f, w)) pts.push_back(b);
  double best = 0.0;
  auto consider = [&](Point p) {
    double v = std::fabs(evaluate(f, p));
    if (v > best) best = v;
  };
  const double nudge = 1e-12 * std::max(1.0, w.length());
  for (double t : pts) {
    bool left_edge = t == w.lo, right_edge = t == w.hi;
    if (!right_edge) consider(Point{t, nudge});
    if (!left_edge) consider(Point{t, -nudge});
    if (!left_edge && !right_edge) consider(Point{t, 0.0});
  }
  return best;
}

struct SmallNormOutcome {
  double value = 0.0;
  std::optional<double> argmin_eps;
  bool surrogate_used = false;
};

// inf over eps of eps^{-theta/(p-eps)} ‖g χ_window‖_{(p-eps)'}, reported at the best probed eps.
inline SmallNormOutcome eps_inf_conjugate(const Expr& g, const GrandExponent& G, const Interval& window,
                                          const GrandOptions& opt = {}) {
  if (window.empty()) throw Error(ErrorKind::invalid_argument, "empty window");
  if (!is_bounded_on(g, window)) throw Error(ErrorKind::unbounded_integrand, "small-norm part has a singular node");
  Interval w = window.intersect(support_hull(g));
  if (w.empty()) return {};
  const double sup = sup_abs_sample(g, w);
  if (sup == 0.0) return {};
  const double s_lo = G.conjugate();
  std::optional<PowerMean> pm;
  if (s_lo <= opt.r_cap) pm.emplace(g, w, s_lo, opt.r_cap, opt);
  bool surrogate = false;
  auto norm_at = [&](double s, bool& used) {
    if (std::isinf(s) || s > opt.r_cap || !pm) {
      used = true;
      return std::isinf(s) ? sup : sup * std::pow(w.length(), 1.0 / s);
    }
    return pm->rnorm(s);
  };
  auto fn = [&](double eps) {
    bool used = false;
    double n = norm_at(G.conjugate_at(eps), used);
    if (G.theta() == 0.0 || n == 0.0) return n;
    return std::exp(-G.theta() * std::log(eps) / (G.p() - eps) + std::log(n));
  };
  ScanResult s = scan_minimum(fn, detail::eps_min(G, opt), G.eps_max(), opt.scan());
  norm_at(G.conjugate_at(s.arg), surrogate);
  return {s.value, s.arg, surrogate};
}

}  // namespace grandamalgam
