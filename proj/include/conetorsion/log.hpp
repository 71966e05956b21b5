#pragma once

#include <cstdint>

namespace conetorsion {

enum class LogLevel : std::uint8_t { Quiet = 0, Info = 1, Debug = 2 };

// Level from CONE_TORSION_LOG in {quiet, info, debug}; quiet when unset.
LogLevel log_level();

void log_info(const char* fmt, ...);
void log_debug(const char* fmt, ...);

}  // namespace conetorsion
