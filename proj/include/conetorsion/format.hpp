#pragma once

#include <charconv>
#include <string>

namespace conetorsion {

// Shortest round-trip decimal representation. Every file writer uses this so
// repeated runs with the same inputs produce byte-identical output.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace conetorsion
