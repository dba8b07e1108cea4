#include "core/log.hpp"

#include <cstdlib>
#include <mutex>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace lbdd {

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("latticebdd");
    spdlog::set_default_logger(logger);
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("LATTICEBDD_LOG"); env && *env) {
      level = spdlog::level::from_str(env);
      // from_str maps unknown names to off; keep warn instead.
      if (level == spdlog::level::off && std::string_view(env) != "off") level = spdlog::level::warn;
    }
    spdlog::set_level(level);
  });
}

}  // namespace lbdd
