#pragma once

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace grandamalgam {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi > lo ? hi - lo : 0.0; }
  bool empty() const { return !(hi > lo); }
  bool contains(double t) const { return lo <= t && t <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  Interval intersect(const Interval& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
  bool operator==(const Interval&) const = default;
};

class MeasureSpace {
 public:
  MeasureSpace(double lower, double upper) : domain_{lower, upper} {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper))
      throw Error(ErrorKind::invalid_argument, "measure space needs finite lower < upper");
  }

  double lower() const { return domain_.lo; }
  double upper() const { return domain_.hi; }
  double mass() const { return domain_.hi - domain_.lo; }
  const Interval& domain() const { return domain_; }

 private:
  Interval domain_;
};

// Throws unless window is a nonempty subinterval of the space.
inline void require_window(const Interval& window, const MeasureSpace& omega) {
  if (window.empty() || !omega.domain().contains(window))
    throw Error(ErrorKind::invalid_argument, "window must be a nonempty subinterval of the measure space");
}

}  // namespace grandamalgam
