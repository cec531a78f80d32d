#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "alexcmp/error.hpp"

namespace alexcmp::detail {

inline double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::MalformedInput, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Two comma-separated numbers.
inline std::pair<double, double> parse_pair(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) {
    throw Error(ErrorKind::MalformedInput, "expected '<num>,<num>', got '" + std::string(text) + "'");
  }
  return {parse_double(parts[0]), parse_double(parts[1])};
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace alexcmp::detail
