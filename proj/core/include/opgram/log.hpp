#pragma once

#include <string_view>

namespace opgram {

/// Log verbosity, configured once from the OPGRAM_LOG environment variable
/// (off|error|warn|info|debug). Default: info.
enum class LogLevel { Off = 0, Error, Warn, Info, Debug };

LogLevel log_level() noexcept;

void log(LogLevel level, std::string_view message) noexcept;

inline void log_error(std::string_view m) noexcept { log(LogLevel::Error, m); }
inline void log_warn(std::string_view m) noexcept { log(LogLevel::Warn, m); }
inline void log_info(std::string_view m) noexcept { log(LogLevel::Info, m); }
inline void log_debug(std::string_view m) noexcept { log(LogLevel::Debug, m); }

}  // namespace opgram
