#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

#include "error.hpp"

namespace grandamalgam {

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel parse_log_level(const std::string& s) {
  if (s == "error") return LogLevel::error;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  throw Error(ErrorKind::config, "GRANDAMALGAM_LOG must be one of error, info, debug; got \"" + s + "\"");
}

class Logger {
 public:
  static Logger& get() {
    static Logger l;
    return l;
  }

  // Reads GRANDAMALGAM_LOG; unset means "error".
  void configure_from_env() {
    const char* v = std::getenv("GRANDAMALGAM_LOG");
    level_ = v ? parse_log_level(v) : LogLevel::error;
  }

  void set_level(LogLevel l) { level_ = l; }
  LogLevel level() const { return level_; }

  void write(LogLevel l, const std::string& msg) {
    if (static_cast<int>(l) > static_cast<int>(level_)) return;
    static const char* names[] = {"error", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu_);
    std::cerr << '[' << names[static_cast<int>(l)] << "] " << msg << '\n';
  }

 private:
  LogLevel level_ = LogLevel::error;
  std::mutex mu_;
};

inline void log_error(const std::string& m) { Logger::get().write(LogLevel::error, m); }
inline void log_info(const std::string& m) { Logger::get().write(LogLevel::info, m); }
inline void log_debug(const std::string& m) { Logger::get().write(LogLevel::debug, m); }

}  // namespace grandamalgam
