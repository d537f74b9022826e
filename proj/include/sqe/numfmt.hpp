// Number <-> text helpers shared by all file writers. Doubles are written
// in the shortest form that round-trips exactly, so save/load is lossless
// and repeated runs produce byte-identical files.
#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace sqe {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

// Strict parsers: the whole token must be consumed.
bool parse_double(std::string_view token, double& out);
bool parse_int64(std::string_view token, std::int64_t& out);

}  // namespace sqe
