#pragma once

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

namespace tlab {

/// Floating-point formatting with 17 significant digits, enough to
/// round-trip an IEEE double and keep output files reproducible.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
  static const LogLevel lvl = [] {
    const char* env = std::getenv("TRANSLATOR_LAB_LOG");
    if (!env) return LogLevel::Error;
    const std::string s(env);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    return LogLevel::Error;
  }();
  return lvl;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace tlab
