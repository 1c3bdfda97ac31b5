#pragma once

#include <charconv>
#include <string>

namespace hopfkit::io {

/// Shortest decimal representation that round-trips to the same double.
inline std::string fmt(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace hopfkit::io
