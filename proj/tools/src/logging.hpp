#pragma once

#include <string>

namespace plateau_cli {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Level from PLATEAU_P_LOG (error, warn, info, debug); warn by default.
LogLevel log_level();
void log(LogLevel level, const std::string& msg);

}  // namespace plateau_cli
