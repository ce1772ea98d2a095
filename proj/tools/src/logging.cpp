#include "logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace plateau_cli {

LogLevel log_level() {
  const char* env = std::getenv("PLATEAU_P_LOG");
  if (!env) return LogLevel::warn;
  const std::string s(env);
  if (s == "error") return LogLevel::error;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

void log(LogLevel level, const std::string& msg) {
  static std::mutex mu;
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[plateau " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace plateau_cli
