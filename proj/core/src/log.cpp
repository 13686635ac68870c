#include "opgram/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace opgram {

namespace {

LogLevel parse_level() noexcept {
  const char* env = std::getenv("OPGRAM_LOG");
  if (!env) return LogLevel::Info;
  std::string v(env);
  if (v == "off") return LogLevel::Off;
  if (v == "error") return LogLevel::Error;
  if (v == "warn") return LogLevel::Warn;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

const char* level_tag(LogLevel level) noexcept {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
    default: return "";
  }
}

}  // namespace

LogLevel log_level() noexcept {
  static const LogLevel level = parse_level();
  return level;
}

void log(LogLevel level, std::string_view message) noexcept {
  if (level == LogLevel::Off || level > log_level()) return;
  std::fprintf(stderr, "opgram [%s] %.*s\n", level_tag(level),
               static_cast<int>(message.size()), message.data());
}

}  // namespace opgram
