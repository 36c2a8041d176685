// Copyright The paro-afem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PARO_TYPES_HPP
#define PARO_TYPES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace paro
{

using Vector = std::vector<double>;

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b)
{
  return {a.x + b.x, a.y + b.y};
}

inline Point operator-(Point a, Point b)
{
  return {a.x - b.x, a.y - b.y};
}

inline Point operator*(double s, Point a)
{
  return {s * a.x, s * a.y};
}

inline double dot(Point a, Point b)
{
  return a.x * b.x + a.y * b.y;
}

inline double cross(Point a, Point b)
{
  return a.x * b.y - a.y * b.x;
}

// All recoverable failures in the library are reported through this type (or a subclass),
// with a message that names the offending object (element, vector, config line, ...).
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace paro

#endif  // PARO_TYPES_HPP
