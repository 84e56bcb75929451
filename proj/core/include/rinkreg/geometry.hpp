/* Copyright 2026 The rinkreg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef RINKREG_GEOMETRY_HPP_
#define RINKREG_GEOMETRY_HPP_

#include <cmath>

namespace rinkreg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2& operator+=(const Point2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend Point2 operator+(Point2 a, const Point2& b) { return a += b; }
  friend Point2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, const Point2& p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double Norm(const Point2& p) { return std::hypot(p.x, p.y); }
inline double Distance(const Point2& a, const Point2& b) { return Norm(a - b); }
inline double Cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }

struct Size2 {
  int width = 0;
  int height = 0;
  friend bool operator==(const Size2&, const Size2&) = default;
};

}  // namespace rinkreg

#endif  // RINKREG_GEOMETRY_HPP_
