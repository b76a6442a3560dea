#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace intentfill::log {

enum class Level { Debug, Info, Warn, Error };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink (stderr by default). Returns the old one.
Sink set_sink(Sink sink);
void set_min_level(Level level);

void write(Level level, std::string_view msg);
inline void debug(std::string_view msg) { write(Level::Debug, msg); }
inline void info(std::string_view msg) { write(Level::Info, msg); }
inline void warn(std::string_view msg) { write(Level::Warn, msg); }
inline void error(std::string_view msg) { write(Level::Error, msg); }

}  // namespace intentfill::log
