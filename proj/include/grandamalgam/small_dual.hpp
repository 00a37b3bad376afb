#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "amalgam.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "grand_norm.hpp"
#include "quadrature.hpp"

namespace grandamalgam {

class Decomposition {
 public:
  // Checks Σ parts == total on a dense sample of `domain`.
  Decomposition(const Expr& total, std::vector<Expr> parts, const Interval& domain) : parts_(std::move(parts)) {
    if (parts_.empty()) throw Error(ErrorKind::invalid_argument, "decomposition needs at least one part");
    const int n = 10001;
    for (int i = 0; i < n; ++i) {
      Point pt{domain.lo + domain.length() * (i + 0.5) / n, 0.0};
      double s = 0.0;
      for (const auto& p : parts_) s += evaluate(p, pt);
      double t = evaluate(total, pt);
      if (std::fabs(s - t) > 1e-9 * std::max(1.0, std::fabs(t)))
        throw Error(ErrorKind::invalid_argument, "decomposition parts do not sum to the function");
    }
  }

  static Decomposition single(const Expr& g) { return Decomposition(std::vector<Expr>{g}); }

  const std::vector<Expr>& parts() const { return parts_; }

 private:
  explicit Decomposition(std::vector<Expr> parts) : parts_(std::move(parts)) {}
  std::vector<Expr> parts_;
};

struct SmallBound {
  double value = 0.0;
  bool surrogate_used = false;
};

inline SmallBound small_norm_upper(const GrandExponent& g, const Interval& window, const Decomposition& d,
                                   const GrandOptions& opt = {}) {
  SmallBound out;
  for (const auto& part : d.parts()) {
    if (!is_bounded_on(part, window)) throw Error(ErrorKind::unbounded_integrand, "unbounded part");
    SmallNormOutcome s = eps_inf_conjugate(part, g, window, opt);
    out.value += s.value;
    out.surrogate_used = out.surrogate_used || s.surrogate_used;
  }
  return out;
}

inline SmallBound small_norm_upper(const Expr& f, const GrandExponent& g, const Interval& window,
                                   const GrandOptions& opt = {}) {
  return small_norm_upper(g, window, Decomposition::single(f), opt);
}

// inf over eta of eta^{-theta/(q-eta)} ‖G‖_{(q-eta)'} for a sampled curve G.
inline NormOutcome outer_small_norm(const ControlCurve& c, const GrandExponent& g, const GrandOptions& opt = {}) {
  NormOutcome out{0.0, std::nullopt, 0.0, EvaluationPath::quadrature};
  if (c.samples.empty()) return out;
  CurveIntegral fine(c);
  if (fine.max_sample() == 0.0) return out;
  const double span = c.x.back() - c.x.front();
  auto norm_at = [&](double s) {
    if (std::isinf(s) || s > opt.r_cap) return std::isinf(s) ? fine.max_sample() : fine.max_sample() * std::pow(span, 1.0 / s);
    return fine.rnorm(s);
  };
  if (g.theta() == 0.0) {
    out.value = norm_at(g.conjugate());
    return out;
  }
  auto fn = [&](double eta) {
    double n = norm_at(g.conjugate_at(eta));
    return std::exp(-g.theta() * std::log(eta) / (g.p() - eta) + std::log(n));
  };
  ScanResult s = scan_minimum(fn, detail::eps_min(g, opt), g.eps_max(), opt.scan());
  out.value = s.value;
  out.argmax_eps = s.arg;
  return out;
}

inline AmalgamOutcome dual_amalgam_upper(const Expr& g, const GrandExponent& g1, const GrandExponent& g2,
                                         const Window& q, const MeasureSpace& omega, const AmalgamOptions& opt = {}) {
  if (!is_bounded_on(g, omega.domain())) throw Error(ErrorKind::unbounded_integrand, "dual bound needs bounded g");
  auto sampler = [&](const Interval& w) {
    return NormOutcome{small_norm_upper(g, g1, w, opt.inner).value, std::nullopt, 0.0, EvaluationPath::quadrature};
  };
  auto outer = [&](const ControlCurve& c) { return outer_small_norm(c, g2, opt.inner); };
  return refine_amalgam(control_cuts(g, q, omega, opt.x_domain), q, omega, sampler, outer, opt);
}

struct PairingReport {
  double integral = 0.0;
  double left = 0.0;
  double right = 0.0;
  double margin = 0.0;

  bool pass(double tol = 1e-6) const { return margin >= -tol; }
};

// ∫_Ω |f g|, refusing divergent pairings from the AST.
inline double pairing_integral(const Expr& f, const Expr& g, const MeasureSpace& omega,
                               const QuadratureOptions& qo = {}) {
  Expr h = Expr::product({f, g});
  if (divergence_threshold(h, omega.domain()) <= 1.0)
    throw Error(ErrorKind::divergent_pairing, "exponent sum at a singular endpoint is <= -1");
  if (support_hull(h).intersect(omega.domain()).empty()) return 0.0;
  return integrate_power_mean(h, 1.0, omega.domain(), qo.rel_tol, qo.max_panels).value;
}

inline PairingReport holder_pairing(const Expr& f, const Expr& g, const GrandExponent& g1, const GrandExponent& g2,
                                    const Window& q, const MeasureSpace& omega, const AmalgamOptions& opt = {}) {
  PairingReport r;
  r.integral = pairing_integral(f, g, omega, opt.inner.quadrature);
  r.left = amalgam_norm(f, g1, g2, q, omega, opt).norm.value;
  r.right = dual_amalgam_upper(g, g1, g2, q, omega, opt).norm.value;
  double prod = (r.left == 0.0 || r.right == 0.0) ? 0.0 : r.left * r.right;
  r.margin = prod - r.integral;
  return r;
}

// {1, t, 1-t, lower half, upper half, t^{-1/(2p)}} rescaled to the space.
inline std::vector<Expr> default_probes(const MeasureSpace& omega, double p) {
  const double lo = omega.lower(), hi = omega.upper(), len = omega.mass(), mid = lo + 0.5 * len;
  return {Expr::constant(1.0),
          Expr::power(1.0 / len, lo, 1.0),
          Expr::power(1.0 / len, hi, 1.0),
          Expr::indicator(lo, mid),
          Expr::indicator(mid, hi),
          Expr::power(std::pow(len, 1.0 / (2.0 * p)), lo, -1.0 / (2.0 * p))};
}

inline double associate_lower_bound(const Expr& g, const GrandExponent& g1, const GrandExponent& g2, const Window& q,
                                    const MeasureSpace& omega, const std::vector<Expr>& probes,
                                    const AmalgamOptions& opt = {}) {
  double best = 0.0;
  for (const auto& f : probes) {
    double n = amalgam_norm(f, g1, g2, q, omega, opt).norm.value;
    if (n == 0.0 || std::isinf(n)) continue;
    best = std::max(best, pairing_integral(f, g, omega, opt.inner.quadrature) / n);
  }
  return best;
}

}  // namespace grandamalgam
