#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace grandamalgam {

enum class EvaluationPath { closed_form, quadrature };

inline const char* to_string(EvaluationPath p) {
  return p == EvaluationPath::closed_form ? "closed-form" : "quadrature";
}

struct NormOutcome {
  double value = 0.0;  // +inf represents divergence
  std::optional<double> argmax_eps;
  double error_estimate = 0.0;
  EvaluationPath path = EvaluationPath::closed_form;

  bool finite() const { return std::isfinite(value); }

  static NormOutcome infinite(EvaluationPath path) {
    return {std::numeric_limits<double>::infinity(), std::nullopt, 0.0, path};
  }
};

}  // namespace grandamalgam
