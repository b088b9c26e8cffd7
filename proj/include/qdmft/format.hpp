#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "qdmft/errors.hpp"

namespace qdmft {

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto first = s.data();
  auto last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParameterError("not a number: '" + std::string(s) + "'");
  return v;
}

}  // namespace qdmft
