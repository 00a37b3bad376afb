#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace grandamalgam {

struct ScanOptions {
  int grid_points = 200;
  double resolution = 1e-8;
  int max_refined_peaks = 8;
  bool keep_probes = false;
};

struct ScanResult {
  double value = 0.0;
  double arg = 0.0;
  bool infinite = false;
  std::vector<std::pair<double, double>> probes;
};

namespace detail {

template <class Fn>
std::pair<double, double> golden_max(Fn& fn, double a, double b, double resolution,
                                     std::vector<std::pair<double, double>>* probes) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = fn(c), fd = fn(d);
  if (probes) probes->insert(probes->end(), {{c, fc}, {d, fd}});
  while (b - a > resolution) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = fn(c);
      if (probes) probes->push_back({c, fc});
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = fn(d);
      if (probes) probes->push_back({d, fd});
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

// Sup of fn over [lo, hi] via a log-spaced grid, then golden-section around the best local maxima.
// Any +inf probe makes the result +inf.
template <class Fn>
ScanResult scan_maximum(Fn&& fn, double lo, double hi, const ScanOptions& opt = {}) {
  ScanResult out;
  const int n = std::max(2, opt.grid_points);
  std::vector<double> xs(n), vs(n);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo * std::exp(ratio * i / (n - 1));
    vs[i] = fn(xs[i]);
    if (opt.keep_probes) out.probes.push_back({xs[i], vs[i]});
    if (std::isinf(vs[i])) {
      out.value = std::numeric_limits<double>::infinity();
      out.infinite = true;
      return out;
    }
  }
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (vs[i] > vs[best]) best = i;
  out.value = vs[best];
  out.arg = xs[best];

  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    bool left_ok = i == 0 || vs[i] > vs[i - 1];
    bool right_ok = i + 1 == n || vs[i] >= vs[i + 1];
    bool strict_somewhere = (i > 0 && vs[i] > vs[i - 1]) || (i + 1 < n && vs[i] > vs[i + 1]);
    if (left_ok && right_ok && strict_somewhere) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vs[a] > vs[b]; });
  if (static_cast<int>(peaks.size()) > opt.max_refined_peaks) peaks.resize(opt.max_refined_peaks);

  auto* probes = opt.keep_probes ? &out.probes : nullptr;
  for (int i : peaks) {
    double a = xs[std::max(i - 1, 0)], b = xs[std::min(i + 1, n - 1)];
    auto [x, v] = detail::golden_max(fn, a, b, opt.resolution, probes);
    if (std::isinf(v)) {
      out.value = v;
      out.infinite = true;
      return out;
    }
    if (v > out.value) {
      out.value = v;
      out.arg = x;
    }
  }
  return out;
}

template <class Fn>
ScanResult scan_minimum(Fn&& fn, double lo, double hi, const ScanOptions& opt = {}) {
  ScanResult r = scan_maximum([&](double x) { return -fn(x); }, lo, hi, opt);
  r.value = -r.value;
  for (auto& p : r.probes) p.second = -p.second;
  return r;
}

}  // namespace grandamalgam
