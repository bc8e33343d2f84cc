#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace dynbc {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from DYNBC_LOG (error|info|debug), read once. Default: error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DYNBC_LOG");
    if (env == nullptr) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

inline void log_msg(LogLevel lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  const char* tag = lvl == LogLevel::error ? "error" : (lvl == LogLevel::info ? "info" : "debug");
  std::fprintf(stderr, "[dynbc %s] %s\n", tag, msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::error, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::debug, msg); }

}  // namespace dynbc
