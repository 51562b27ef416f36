#include "pks/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace pks::log {
namespace {
std::atomic<Level> g_threshold{Level::info};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warning: return "warning";
    case Level::error: return "error";
  }
  return "?";
}
}  // namespace

void set_threshold(Level level) { g_threshold = level; }
Level threshold() { return g_threshold; }

void write(Level level, std::string_view message) {
  if (level < g_threshold.load()) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[pks " << tag(level) << "] " << message << '\n';
}

}  // namespace pks::log
