#include "mixoram/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

#include "mixoram/error.hpp"

namespace mixoram {

void set_log_level(std::string_view level) {
  auto lvl = spdlog::level::from_str(std::string(level));
  // from_str maps unknown names to off; only accept that for the literal "off".
  if (lvl == spdlog::level::off && level != "off") {
    fail(Errc::kInvalidArgument, "unknown log level: " + std::string(level));
  }
  spdlog::set_level(lvl);
}

void init_logging() {
  const char* env = std::getenv("MIXORAM_LOG");
  set_log_level(env && *env ? env : "warn");
}

}  // namespace mixoram
