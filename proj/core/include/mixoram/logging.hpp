#pragma once

#include <string_view>

namespace mixoram {

// Sets the process-wide log level from MIXORAM_LOG (trace, debug, info, warn, error, off).
// Defaults to warn.
void init_logging();
// Throws kInvalidArgument for an unknown level name.
void set_log_level(std::string_view level);

}  // namespace mixoram
