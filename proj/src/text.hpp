// Small text helpers shared by the config parser and the CSV writers.

#ifndef LEVERALIGN_SRC_TEXT_HPP
#define LEVERALIGN_SRC_TEXT_HPP

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

namespace leveralign::text {

/// 17 significant digits, the fixed CSV format.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Shortest decimal form that parses back to the same double.
inline std::string fmt_short(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace leveralign::text

#endif  // LEVERALIGN_SRC_TEXT_HPP
