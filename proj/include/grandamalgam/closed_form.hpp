#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "expr.hpp"
#include "interval.hpp"
#include "outcome.hpp"

namespace grandamalgam {

namespace detail {

// ∫ s^g ds over [d1, d2] with 0 <= d1 < d2; +inf when g <= -1 and d1 == 0.
inline double power_segment(double g, double d1, double d2) {
  if (!(d2 > d1)) return 0.0;
  double s = g + 1.0;
  if (d1 == 0.0) {
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    return std::exp(s * std::log(d2)) / s;
  }
  double l = std::log(d1 / d2);
  if (s == 0.0) return -l;
  return std::exp(s * std::log(d2)) * -std::expm1(s * l) / s;
}

// ∫_window |t - c|^g dt
inline double centered_power_integral(double g, double c, const Interval& w) {
  if (g == 0.0) return w.length();
  if (w.hi <= c) return power_segment(g, c - w.hi, c - w.lo);
  if (w.lo >= c) return power_segment(g, w.lo - c, w.hi - c);
  return power_segment(g, 0.0, c - w.lo) + power_segment(g, 0.0, w.hi - c);
}

}  // namespace detail

// ∫_window |m|^r dt in closed form; +inf when divergent.
inline double monomial_power_integral(const Monomial& m, double r, const Interval& window) {
  Interval w = window.intersect(m.clip);
  if (w.empty() || m.coeff == 0.0) return 0.0;
  return std::pow(std::fabs(m.coeff), r) * detail::centered_power_integral(m.exponent * r, m.center, w);
}

// (∫_window |m|^r)^{1/r}, factored so that scaling the coefficient scales the result exactly.
inline double monomial_rnorm(const Monomial& m, double r, const Interval& window) {
  Interval w = window.intersect(m.clip);
  if (w.empty() || m.coeff == 0.0) return 0.0;
  double base = detail::centered_power_integral(m.exponent * r, m.center, w);
  if (std::isinf(base)) return base;
  return std::fabs(m.coeff) * std::pow(base, 1.0 / r);
}

inline std::optional<NormOutcome> closed_form_rnorm(const Expr& f, double r, const MeasureSpace& omega,
                                                    const Interval& window) {
  if (!(r >= 1.0)) throw Error(ErrorKind::invalid_argument, "closed_form_rnorm needs r >= 1");
  require_window(window, omega);
  auto m = monomial_form(f);
  if (!m) return std::nullopt;
  return NormOutcome{monomial_rnorm(*m, r, window), std::nullopt, 0.0, EvaluationPath::closed_form};
}

}  // namespace grandamalgam
