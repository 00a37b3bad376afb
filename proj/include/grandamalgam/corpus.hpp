#pragma once

#include <string>
#include <vector>

#include "expr.hpp"
#include "interval.hpp"

namespace grandamalgam {

struct NamedFunction {
  std::string name;
  Expr expr;
};

// Twelve test functions: constants, linear ramps, indicators, the t^{-1/p} family, a truncation and sums.
inline std::vector<NamedFunction> default_corpus(const MeasureSpace& omega) {
  const double lo = omega.lower(), hi = omega.upper(), len = omega.mass();
  const Expr linear = Expr::power(1.0 / len, lo, 1.0);
  return {
      {"zero", Expr::constant(0.0)},
      {"one", Expr::constant(1.0)},
      {"half", Expr::constant(0.5)},
      {"linear", linear},
      {"reverse", Expr::power(1.0 / len, hi, 1.0)},
      {"lower_half", Expr::indicator(lo, lo + 0.5 * len)},
      {"middle", Expr::indicator(lo + 0.25 * len, lo + 0.75 * len)},
      {"singular", Expr::power(1.0, lo, -0.5)},
      {"singular_quarter", Expr::power(1.0, lo, -0.25)},
      {"truncated", Expr::truncate_above(2.0, Expr::power(0.5, lo, -0.5))},
      {"affine_sum", Expr::sum({Expr::constant(0.5), Expr::scale(0.5, linear)})},
      {"mixed_sum", Expr::sum({Expr::scale(0.25, Expr::power(1.0, lo, -0.25)),
                               Expr::scale(0.5, Expr::indicator(lo + 0.5 * len, hi))})},
  };
}

// t^{-1/p} anchored at the lower end of the space.
inline Expr singular_witness(const MeasureSpace& omega, double p) { return Expr::power(1.0, omega.lower(), -1.0 / p); }

}  // namespace grandamalgam
