#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "expr.hpp"

namespace grandamalgam {

using json = nlohmann::ordered_json;

// +inf is written as the string "inf" so documents stay plain JSON.
inline json extended_to_json(double v) {
  if (std::isinf(v) && v > 0.0) return "inf";
  return v;
}

inline double extended_from_json(const json& j, const char* what) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw Error(ErrorKind::config, std::string(what) + " must be a number or \"inf\"");
  return j.get<double>();
}

inline json to_json(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return {{"kind", "constant"}, {"value", e.value()}};
    case Expr::Kind::power:
      return {{"kind", "power"}, {"coeff", e.coeff()}, {"center", e.center()}, {"exponent", e.exponent()}};
    case Expr::Kind::indicator:
      return {{"kind", "indicator"}, {"lo", e.lo()}, {"hi", e.hi()}};
    case Expr::Kind::sum:
    case Expr::Kind::product: {
      json list = json::array();
      for (const auto& c : e.children()) list.push_back(to_json(c));
      if (e.kind() == Expr::Kind::sum) return {{"kind", "sum"}, {"terms", list}};
      return {{"kind", "product"}, {"factors", list}};
    }
    case Expr::Kind::scale:
      return {{"kind", "scale"}, {"factor", e.factor()}, {"expr", to_json(e.child())}};
    case Expr::Kind::truncate_above:
      return {{"kind", "truncate_above"}, {"level", extended_to_json(e.level())}, {"expr", to_json(e.child())}};
  }
  return {};
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::config, std::string("expression node is missing \"") + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw Error(ErrorKind::config, std::string("expression field \"") + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace detail

inline Expr expr_from_json(const json& j) {
  const std::string kind = detail::field(j, "kind").get<std::string>();
  try {
    if (kind == "constant") return Expr::constant(detail::number(j, "value"));
    if (kind == "power")
      return Expr::power(detail::number(j, "coeff"), detail::number(j, "center"), detail::number(j, "exponent"));
    if (kind == "indicator") return Expr::indicator(detail::number(j, "lo"), detail::number(j, "hi"));
    if (kind == "sum" || kind == "product") {
      const json& list = detail::field(j, kind == "sum" ? "terms" : "factors");
      if (!list.is_array()) throw Error(ErrorKind::config, kind + " children must be an array");
      std::vector<Expr> cs;
      for (const auto& c : list) cs.push_back(expr_from_json(c));
      return kind == "sum" ? Expr::sum(std::move(cs)) : Expr::product(std::move(cs));
    }
    if (kind == "scale") return Expr::scale(detail::number(j, "factor"), expr_from_json(detail::field(j, "expr")));
    if (kind == "truncate_above")
      return Expr::truncate_above(extended_from_json(detail::field(j, "level"), "level"),
                                  expr_from_json(detail::field(j, "expr")));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, e.what());
  }
  throw Error(ErrorKind::config, "unknown expression kind \"" + kind + "\"");
}

}  // namespace grandamalgam
