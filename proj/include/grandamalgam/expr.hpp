#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "interval.hpp"

namespace grandamalgam {

class Expr {
 public:
  enum class Kind { constant, power, indicator, sum, product, scale, truncate_above };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value) {
    require_finite(value, "constant");
    return Expr(Kind::constant, value, 0.0, 0.0, {});
  }
  // coeff * |t - center|^exponent
  static Expr power(double coeff, double center, double exponent) {
    require_finite(coeff, "power coefficient");
    require_finite(center, "power center");
    require_finite(exponent, "power exponent");
    return Expr(Kind::power, coeff, center, exponent, {});
  }
  // characteristic function of [lo, hi)
  static Expr indicator(double lo, double hi) {
    require_finite(lo, "indicator bound");
    require_finite(hi, "indicator bound");
    if (!(lo < hi)) throw Error(ErrorKind::invalid_argument, "indicator needs lo < hi");
    return Expr(Kind::indicator, lo, hi, 0.0, {});
  }
  static Expr sum(std::vector<Expr> terms) {
    if (terms.empty()) throw Error(ErrorKind::invalid_argument, "sum needs at least one term");
    return Expr(Kind::sum, 0.0, 0.0, 0.0, std::move(terms));
  }
  static Expr product(std::vector<Expr> factors) {
    if (factors.empty()) throw Error(ErrorKind::invalid_argument, "product needs at least one factor");
    return Expr(Kind::product, 0.0, 0.0, 0.0, std::move(factors));
  }
  static Expr scale(double factor, Expr e) {
    require_finite(factor, "scale factor");
    return Expr(Kind::scale, factor, 0.0, 0.0, {std::move(e)});
  }
  // min(|e|, level); level may be +inf
  static Expr truncate_above(double level, Expr e) {
    if (std::isnan(level) || level < 0.0)
      throw Error(ErrorKind::invalid_argument, "truncation level must be >= 0");
    return Expr(Kind::truncate_above, level, 0.0, 0.0, {std::move(e)});
  }

  Kind kind() const { return node_->kind; }
  double value() const { return node_->a; }
  double coeff() const { return node_->a; }
  double center() const { return node_->b; }
  double exponent() const { return node_->c; }
  double lo() const { return node_->a; }
  double hi() const { return node_->b; }
  double factor() const { return node_->a; }
  double level() const { return node_->a; }
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child() const { return node_->children.front(); }

  double operator()(double t) const;

 private:
  struct Node {
    Kind kind;
    double a, b, c;
    std::vector<Expr> children;
  };

  Expr(Kind kind, double a, double b, double c, std::vector<Expr> children)
      : node_(std::make_shared<const Node>(Node{kind, a, b, c, std::move(children)})) {}

  static void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, std::string(what) + " must be finite");
  }

  std::shared_ptr<const Node> node_;
};

inline Expr operator+(Expr a, Expr b) { return Expr::sum({std::move(a), std::move(b)}); }
inline Expr operator*(Expr a, Expr b) { return Expr::product({std::move(a), std::move(b)}); }
inline Expr operator*(double s, Expr e) { return Expr::scale(s, std::move(e)); }

// t = anchor + offset, kept split so a distance to a singular anchor survives rounding
struct Point {
  double anchor = 0.0;
  double offset = 0.0;
};

namespace detail {

inline bool indicator_contains(double lo, double hi, Point p) {
  double t = p.anchor + p.offset;
  if (p.offset != 0.0 && t == p.anchor) {
    if (p.offset > 0.0) return lo <= p.anchor && p.anchor < hi;
    return lo < p.anchor && p.anchor <= hi;
  }
  return lo <= t && t < hi;
}

}  // namespace detail

inline double evaluate(const Expr& e, Point p) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e.value();
    case Expr::Kind::power: {
      double d = e.center() == p.anchor ? std::fabs(p.offset)
                                        : std::fabs((p.anchor - e.center()) + p.offset);
      if (e.exponent() == 0.0) return e.coeff();
      if (d == 0.0) {
        if (e.exponent() < 0.0)
          throw Error(ErrorKind::singular_point, "negative power evaluated at its center");
        return 0.0;
      }
      return e.coeff() * std::pow(d, e.exponent());
    }
    case Expr::Kind::indicator:
      return detail::indicator_contains(e.lo(), e.hi(), p) ? 1.0 : 0.0;
    case Expr::Kind::sum: {
      double s = 0.0;
      for (const auto& c : e.children()) s += evaluate(c, p);
      return s;
    }
    case Expr::Kind::product: {
      double s = 1.0;
      for (const auto& c : e.children()) {
        s *= evaluate(c, p);
        if (s == 0.0) return 0.0;
      }
      return s;
    }
    case Expr::Kind::scale:
      return e.factor() == 0.0 ? 0.0 : e.factor() * evaluate(e.child(), p);
    case Expr::Kind::truncate_above:
      if (e.level() == 0.0) return 0.0;
      return std::min(std::fabs(evaluate(e.child(), p)), e.level());
  }
  return 0.0;
}

inline double evaluate(const Expr& e, double t) { return evaluate(e, Point{t, 0.0}); }

inline double Expr::operator()(double t) const { return evaluate(*this, t); }

// |f(anchor + side*s)| ~ |coeff| * s^exponent as s -> 0+.  coeff is signed so that sums may cancel.
struct Asymptote {
  double coeff = 0.0;
  double exponent = 0.0;
  bool vanishes = true;
};

inline Asymptote leading_term(const Expr& e, double anchor, int side) {
  auto make = [](double c, double a) { return c == 0.0 ? Asymptote{} : Asymptote{c, a, false}; };
  switch (e.kind()) {
    case Expr::Kind::constant:
      return make(e.value(), 0.0);
    case Expr::Kind::power:
      if (e.exponent() == 0.0) return make(e.coeff(), 0.0);
      if (e.center() == anchor) return make(e.coeff(), e.exponent());
      return make(e.coeff() * std::pow(std::fabs(anchor - e.center()), e.exponent()), 0.0);
    case Expr::Kind::indicator: {
      bool in = side > 0 ? (e.lo() <= anchor && anchor < e.hi()) : (e.lo() < anchor && anchor <= e.hi());
      return in ? Asymptote{1.0, 0.0, false} : Asymptote{};
    }
    case Expr::Kind::scale: {
      Asymptote a = leading_term(e.child(), anchor, side);
      if (a.vanishes) return a;
      return make(a.coeff * e.factor(), a.exponent);
    }
    case Expr::Kind::product: {
      Asymptote acc{1.0, 0.0, false};
      for (const auto& c : e.children()) {
        Asymptote a = leading_term(c, anchor, side);
        if (a.vanishes) return Asymptote{};
        acc.coeff *= a.coeff;
        acc.exponent += a.exponent;
      }
      return make(acc.coeff, acc.exponent);
    }
    case Expr::Kind::sum: {
      std::vector<Asymptote> terms;
      for (const auto& c : e.children()) {
        Asymptote a = leading_term(c, anchor, side);
        if (!a.vanishes) terms.push_back(a);
      }
      std::sort(terms.begin(), terms.end(),
                [](const Asymptote& x, const Asymptote& y) { return x.exponent < y.exponent; });
      for (std::size_t i = 0; i < terms.size();) {
        std::size_t j = i;
        double c = 0.0;
        while (j < terms.size() && terms[j].exponent == terms[i].exponent) c += terms[j++].coeff;
        if (c != 0.0) return Asymptote{c, terms[i].exponent, false};
        i = j;
      }
      return Asymptote{};
    }
    case Expr::Kind::truncate_above: {
      Asymptote a = leading_term(e.child(), anchor, side);
      if (a.vanishes || e.level() == 0.0) return Asymptote{};
      if (std::isinf(e.level()) || a.exponent > 0.0) return make(std::fabs(a.coeff), a.exponent);
      if (a.exponent < 0.0) return make(e.level(), 0.0);
      return make(std::min(std::fabs(a.coeff), e.level()), 0.0);
    }
  }
  return Asymptote{};
}

// f(t) = coeff * |t - center|^exponent on clip, 0 elsewhere
struct Monomial {
  double coeff = 0.0;
  double center = 0.0;
  double exponent = 0.0;
  Interval clip{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
};

inline std::optional<Monomial> monomial_form(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return Monomial{e.value()};
    case Expr::Kind::power:
      if (e.exponent() == 0.0) return Monomial{e.coeff()};
      return Monomial{e.coeff(), e.center(), e.exponent()};
    case Expr::Kind::indicator: {
      Monomial m{1.0};
      m.clip = {e.lo(), e.hi()};
      return m;
    }
    case Expr::Kind::scale: {
      auto m = monomial_form(e.child());
      if (m) m->coeff *= e.factor();
      return m;
    }
    case Expr::Kind::sum:
      if (e.children().size() == 1) return monomial_form(e.child());
      return std::nullopt;
    case Expr::Kind::product: {
      Monomial acc{1.0};
      for (const auto& c : e.children()) {
        auto m = monomial_form(c);
        if (!m) return std::nullopt;
        if (m->exponent != 0.0) {
          if (acc.exponent != 0.0 && acc.center != m->center) return std::nullopt;
          acc.center = m->center;
          acc.exponent += m->exponent;
        }
        acc.coeff *= m->coeff;
        acc.clip = acc.clip.intersect(m->clip);
      }
      return acc;
    }
    case Expr::Kind::truncate_above:
      return std::nullopt;
  }
  return std::nullopt;
}

// Centers of Power nodes that are not smooth there (negative or fractional exponent).
inline void collect_special_points(const Expr& e, std::vector<double>& out) {
  if (e.kind() == Expr::Kind::power) {
    double a = e.exponent();
    if (a != 0.0 && (a < 0.0 || a != std::floor(a))) out.push_back(e.center());
    return;
  }
  for (const auto& c : e.children()) collect_special_points(c, out);
}

inline std::vector<double> special_points(const Expr& e) {
  std::vector<double> out;
  collect_special_points(e, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void collect_breakpoints(const Expr& e, std::vector<double>& out) {
  switch (e.kind()) {
    case Expr::Kind::indicator:
      out.push_back(e.lo());
      out.push_back(e.hi());
      return;
    case Expr::Kind::power:
      collect_special_points(e, out);
      return;
    case Expr::Kind::truncate_above:
      if (auto m = monomial_form(e.child()); m && m->exponent != 0.0 && m->coeff != 0.0 &&
                                             std::isfinite(e.level()) && e.level() > 0.0) {
        double d = std::pow(e.level() / std::fabs(m->coeff), 1.0 / m->exponent);
        if (std::isfinite(d)) {
          out.push_back(m->center - d);
          out.push_back(m->center + d);
        }
      }
      break;
    default:
      break;
  }
  for (const auto& c : e.children()) collect_breakpoints(c, out);
}

// Sorted points strictly inside window where f may fail to be smooth.
inline std::vector<double> breakpoints(const Expr& e, const Interval& window) {
  std::vector<double> all;
  collect_breakpoints(e, all);
  std::vector<double> out;
  for (double b : all)
    if (b > window.lo && b < window.hi) out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Closed interval outside of which f vanishes identically; empty when f == 0.
inline Interval support_hull(const Expr& e) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Interval all{-inf, inf};
  const Interval none{0.0, 0.0};
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e.value() == 0.0 ? none : all;
    case Expr::Kind::power:
      return e.coeff() == 0.0 ? none : all;
    case Expr::Kind::indicator:
      return {e.lo(), e.hi()};
    case Expr::Kind::scale:
      return e.factor() == 0.0 ? none : support_hull(e.child());
    case Expr::Kind::truncate_above:
      return e.level() == 0.0 ? none : support_hull(e.child());
    case Expr::Kind::sum: {
      Interval acc = none;
      bool any = false;
      for (const auto& c : e.children()) {
        Interval h = support_hull(c);
        if (h.empty()) continue;
        acc = any ? Interval{std::min(acc.lo, h.lo), std::max(acc.hi, h.hi)} : h;
        any = true;
      }
      return acc;
    }
    case Expr::Kind::product: {
      Interval acc = all;
      for (const auto& c : e.children()) {
        acc = acc.intersect(support_hull(c));
        if (acc.empty()) return none;
      }
      return acc;
    }
  }
  return all;
}

inline bool negative_power_present(const Expr& e) {
  if (e.kind() == Expr::Kind::power) return e.exponent() < 0.0 && e.coeff() != 0.0;
  for (const auto& c : e.children())
    if (negative_power_present(c)) return true;
  return false;
}

// True unless some negative power makes |f| blow up at a point of the closed window.
inline bool is_bounded_on(const Expr& e, const Interval& window) {
  for (double c : special_points(e)) {
    if (!window.contains(c)) continue;
    for (int side : {+1, -1}) {
      if ((side > 0 && c >= window.hi) || (side < 0 && c <= window.lo)) continue;
      Asymptote a = leading_term(e, c, side);
      if (!a.vanishes && a.exponent < 0.0) return false;
    }
  }
  return true;
}

// Rejects negative powers centered strictly inside the ambient interval.
inline void validate_on(const Expr& e, const Interval& domain) {
  if (e.kind() == Expr::Kind::power && e.exponent() < 0.0 && e.coeff() != 0.0) {
    if (e.center() > domain.lo && e.center() < domain.hi)
      throw Error(ErrorKind::invalid_argument, "negative power must be centered at an interval endpoint");
  }
  for (const auto& c : e.children()) validate_on(c, domain);
}

}  // namespace grandamalgam
