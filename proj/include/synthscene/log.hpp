#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace synth {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Diagnostics go to stderr, data to files/stdout only. Level comes from
// SYNTHSCENE_LOG={error,warn,info,debug}; default is info.
inline LogLevel log_threshold() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SYNTHSCENE_LOG");
    if (env == nullptr) return LogLevel::Info;
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

inline void log_line(LogLevel level, std::string_view msg) {
  if (level > log_threshold()) return;
  const char* tag = "info";
  switch (level) {
    case LogLevel::Error: tag = "error"; break;
    case LogLevel::Warn: tag = "warn"; break;
    case LogLevel::Info: tag = "info"; break;
    case LogLevel::Debug: tag = "debug"; break;
  }
  std::cerr << "[" << tag << "] " << msg << "\n";
}

}  // namespace synth
