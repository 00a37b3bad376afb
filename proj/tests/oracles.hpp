#pragma once

// Brute-force reference computations. Integrands are plain lambdas and the
// quadrature is tanh-sinh, so nothing here shares code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

struct Node {
  double t, w;
};

// Tanh-sinh nodes on (a, b), accurate for integrable singularities at a.
inline std::vector<Node> tanh_sinh(double a, double b, double h = 1.0 / 64) {
  std::vector<Node> out;
  const double half_pi = 0.5 * M_PI, len = b - a;
  for (double s = -6.1; s <= 6.1 + 1e-12; s += h) {
    double y = half_pi * std::sinh(s);
    double e = std::exp(-2.0 * std::fabs(y));
    double lo_frac = y >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    double t = a + len * lo_frac;
    double w = h * half_pi * std::cosh(s) * 4.0 * e / ((1.0 + e) * (1.0 + e)) * 0.5 * len;
    if (!(t > a) || !(t < b) || w == 0.0) continue;
    out.push_back({t, w});
  }
  return out;
}

// Nodes for a piecewise-smooth integrand with the given interior cut points.
inline std::vector<Node> nodes(double a, double b, std::vector<double> cuts = {}) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Node> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
    if (hi <= lo) continue;
    auto part = tanh_sinh(lo, hi);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

class Table {
 public:
  Table(const Fn& f, double a, double b, std::vector<double> cuts = {}) {
    for (const Node& n : nodes(a, b, std::move(cuts))) {
      double v = std::fabs(f(n.t));
      if (v != 0.0) pts_.push_back({v, n.w});
    }
  }
  double power_integral(double r) const {
    double s = 0.0;
    for (const auto& [v, w] : pts_) s += w * std::pow(v, r);
    return s;
  }
  double rnorm(double r) const {
    double s = power_integral(r);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / r);
  }

 private:
  std::vector<std::pair<double, double>> pts_;
};

inline double integral(const Fn& f, double a, double b, std::vector<double> cuts = {}) {
  double s = 0.0;
  for (const Node& n : nodes(a, b, std::move(cuts))) s += n.w * f(n.t);
  return s;
}

// Maximum of fn on (lo, hi]: dense log grid then repeated zooms around the best probe.
inline double dense_max(const Fn& fn, double lo, double hi, double* arg = nullptr, int n = 400) {
  double best = -std::numeric_limits<double>::infinity(), at = hi;
  auto probe = [&](double e) {
    double v = fn(e);
    if (v > best) {
      best = v;
      at = e;
    }
  };
  for (int i = 0; i < n; ++i) probe(lo * std::pow(hi / lo, double(i) / (n - 1)));
  double cell = at * (std::pow(hi / lo, 1.0 / (n - 1)) - 1.0);
  for (int zoom = 0; zoom < 4; ++zoom) {
    double a = std::max(lo, at - cell), b = std::min(hi, at + cell);
    for (int i = 0; i <= 60; ++i) probe(a + (b - a) * i / 60.0);
    cell = (b - a) / 30.0;
  }
  if (arg) *arg = at;
  return best;
}

inline double dense_min(const Fn& fn, double lo, double hi, int n = 400) {
  return -dense_max([&](double e) { return -fn(e); }, lo, hi, nullptr, n);
}

// sup over eps of eps^{theta/(p-eps)} ‖f‖_{p-eps} on (a, b).
inline double grand(const Fn& f, double p, double theta, double a, double b, std::vector<double> cuts = {}) {
  Table t(f, a, b, std::move(cuts));
  if (theta == 0.0) return t.rnorm(p);
  auto phi = [&](double e) { return std::pow(e, theta / (p - e)) * t.rnorm(p - e); };
  return dense_max(phi, 1e-6 * (p - 1.0), p - 1.0);
}

// Grand amalgam norm by brute force: midpoint rule in x over (x_lo, x_hi), inner grand norm
// on (x + q0, x + q0 + w) clipped to (lo, hi), then the outer grand norm of the sampled curve.
inline double amalgam(const Fn& f, double p, double th1, double q, double th2, double q0, double w, double lo,
                      double hi, double x_lo, double x_hi, std::vector<double> cuts = {}, int nx = 400) {
  std::vector<double> F(nx);
  const double dx = (x_hi - x_lo) / nx;
  for (int i = 0; i < nx; ++i) {
    double x = x_lo + (i + 0.5) * dx;
    double a = std::max(lo, x + q0), b = std::min(hi, x + q0 + w);
    F[i] = b > a ? grand(f, p, th1, a, b, cuts) : 0.0;
  }
  auto outer_r = [&](double s) {
    double acc = 0.0;
    for (double v : F) acc += dx * std::pow(v, s);
    return acc == 0.0 ? 0.0 : std::pow(acc, 1.0 / s);
  };
  if (th2 == 0.0) return outer_r(q);
  return dense_max([&](double e) { return std::pow(e, th2 / (q - e)) * outer_r(q - e); }, 1e-6 * (q - 1.0), q - 1.0);
}

// inf over eps of eps^{-theta/(p-eps)} ‖g‖_{(p-eps)'} on (a, b), g bounded, using exponents up to r_cap
// exactly and the sup·length^{1/s} bound beyond.
inline double small(const Fn& g, double p, double theta, double a, double b, double sup, std::vector<double> cuts = {},
                    double r_cap = 64.0) {
  Table t(g, a, b, std::move(cuts));
  auto conj = [](double r) { return r / (r - 1.0); };
  auto val = [&](double e) {
    double s = p - e <= 1.0 ? std::numeric_limits<double>::infinity() : conj(p - e);
    double n = s > r_cap ? sup * (std::isinf(s) ? 1.0 : std::pow(b - a, 1.0 / s)) : t.rnorm(s);
    return theta == 0.0 ? n : std::pow(e, -theta / (p - e)) * n;
  };
  return dense_min(val, 1e-6 * (p - 1.0), p - 1.0);
}

}  // namespace oracle
