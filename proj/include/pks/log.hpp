#pragma once

#include <string_view>

namespace pks::log {

enum class Level { debug, info, warning, error };

/// Messages below the threshold are dropped. Default: info.
void set_threshold(Level level);
Level threshold();

void write(Level level, std::string_view message);

inline void info(std::string_view m) { write(Level::info, m); }
inline void warning(std::string_view m) { write(Level::warning, m); }
inline void debug(std::string_view m) { write(Level::debug, m); }

}  // namespace pks::log
