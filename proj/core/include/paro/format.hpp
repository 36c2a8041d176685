// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_FORMAT_HPP
#define PARO_FORMAT_HPP

#include <charconv>
#include <cmath>
#include <string>

namespace paro
{

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace paro

#endif  // PARO_FORMAT_HPP
