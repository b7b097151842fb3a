#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string_view>

namespace aces::log {

enum class Level { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kSilent = 4 };

inline std::atomic<Level>& threshold() {
  static std::atomic<Level> level{Level::kInfo};
  return level;
}

inline void set_level(Level level) { threshold().store(level); }

// Writes "[aces] <tag>: message" to stderr. Data never goes through here.
inline void write(Level level, std::string_view message) {
  if (level < threshold().load()) return;
  static std::mutex mu;
  static constexpr std::string_view kTags[] = {"debug", "info", "warning", "error"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[aces] " << kTags[static_cast<int>(level)] << ": " << message << '\n';
}

inline void info(std::string_view message) { write(Level::kInfo, message); }
inline void warning(std::string_view message) { write(Level::kWarning, message); }
inline void error(std::string_view message) { write(Level::kError, message); }

}  // namespace aces::log
