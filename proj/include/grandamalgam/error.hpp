#pragma once

#include <stdexcept>
#include <string>

namespace grandamalgam {

enum class ErrorKind {
  invalid_argument,
  singular_point,
  divergent_integral,
  tolerance_not_met,
  unbounded_integrand,
  divergent_pairing,
  unresolved_singularity,
  config
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::singular_point: return "singular point";
    case ErrorKind::divergent_integral: return "divergent integral";
    case ErrorKind::tolerance_not_met: return "tolerance not met";
    case ErrorKind::unbounded_integrand: return "unbounded integrand";
    case ErrorKind::divergent_pairing: return "divergent pairing";
    case ErrorKind::unresolved_singularity: return "unresolved singularity";
    case ErrorKind::config: return "config error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace grandamalgam
