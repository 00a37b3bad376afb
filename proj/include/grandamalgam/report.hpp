#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "amalgam.hpp"
#include "config.hpp"
#include "error.hpp"
#include "verify.hpp"

namespace grandamalgam {

// Shortest round-trip text for a double; "inf", "-inf" and "" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline json number_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  return v;
}

inline json outcome_json(const NormOutcome& n) {
  return {{"value", number_json(n.value)},
          {"argmax_eps", n.argmax_eps ? number_json(*n.argmax_eps) : json(nullptr)},
          {"error_estimate", number_json(n.error_estimate)},
          {"path", to_string(n.path)}};
}

inline json report_json(const CheckReport& r) {
  json q = json::object();
  for (const auto& [k, v] : r.quantities) q[k] = number_json(v);
  json j = {{"schema_version", kSchemaVersion},
            {"claim_id", r.claim_id},
            {"inputs_digest", r.inputs_digest},
            {"inputs", r.inputs},
            {"quantities", q},
            {"margin", number_json(r.margin)},
            {"verdict", to_string(r.verdict)}};
  if (!r.note.empty()) j["note"] = r.note;
  if (r.pairing)
    j["pairing"] = {{"integral", number_json(r.pairing->integral)},
                    {"left", number_json(r.pairing->left)},
                    {"right", number_json(r.pairing->right)},
                    {"margin", number_json(r.pairing->margin)}};
  return j;
}

inline std::string reports_json_text(const std::vector<CheckReport>& rs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(report_json(r));
  return a.dump(2) + "\n";
}

inline std::string reports_csv_text(const std::vector<CheckReport>& rs) {
  std::ostringstream os;
  os << "claim_id,verdict,margin,inputs_digest,schema_version\n";
  for (const auto& r : rs)
    os << r.claim_id << ',' << to_string(r.verdict) << ',' << format_number(r.margin) << ',' << r.inputs_digest << ','
       << kSchemaVersion << '\n';
  return os.str();
}

inline std::string curve_csv_text(const ControlCurve& c) {
  std::ostringstream os;
  os << "x,F,argmax_eps,schema_version\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const NormOutcome& s = c.samples[i];
    os << format_number(c.x[i]) << ',' << format_number(s.value) << ','
       << (s.argmax_eps ? format_number(*s.argmax_eps) : std::string()) << ',' << kSchemaVersion << '\n';
  }
  return os.str();
}

// Writes to a sibling temporary and renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::config, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(ErrorKind::config, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace grandamalgam
