#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <string>
#include <utility>

#include "treetrace/tree.hpp"

namespace treetrace::detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw InvalidArgument("trailing characters in number: " + text);
    return v;
  } catch (const std::logic_error&) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
}

inline int parse_int(const std::string& text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw InvalidArgument("not an integer: '" + text + "'");
  return v;
}

/// "address,value" with an empty address allowed for the root.
inline std::pair<std::string, double> split_row(const std::string& line) {
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw InvalidArgument("CSV row without comma: " + line);
  return {trim(line.substr(0, comma)), parse_double(trim(line.substr(comma + 1)))};
}

/// Reads "K,N", the shape line and the "address,value" column header.
inline std::pair<int, int> read_shape_header(std::istream& in) {
  std::string line;
  auto next = [&]() {
    while (std::getline(in, line)) {
      if (!blank(line)) return trim(line);
    }
    throw InvalidArgument("CSV ended before its header was complete");
  };
  if (next() != "K,N") throw InvalidArgument("CSV must start with a 'K,N' header line");
  const std::string shape = next();
  const auto comma = shape.find(',');
  if (comma == std::string::npos) throw InvalidArgument("malformed K,N line: " + shape);
  const int K = parse_int(trim(shape.substr(0, comma)));
  const int N = parse_int(trim(shape.substr(comma + 1)));
  if (next() != "address,value") throw InvalidArgument("expected 'address,value' column header");
  return {K, N};
}

}  // namespace treetrace::detail
