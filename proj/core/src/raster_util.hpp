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

#ifndef RINKREG_SRC_RASTER_UTIL_HPP_
#define RINKREG_SRC_RASTER_UTIL_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rinkreg/parallel.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg::detail {

using rinkreg::ParallelFor;

// 8-connected components of one class; each entry lists flat pixel indices.
inline std::vector<std::vector<int>> ClassComponents(const SegMap& seg, std::uint8_t cls) {
  const int w = seg.width();
  const int h = seg.height();
  std::vector<std::uint8_t> seen(seg.size(), 0);
  std::vector<std::vector<int>> comps;
  std::vector<int> stack;
  const auto data = seg.data();
  for (int start = 0; start < static_cast<int>(seg.size()); ++start) {
    if (seen[start] || data[start] != cls) continue;
    std::vector<int> comp;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      comp.push_back(idx);
      const int x = idx % w;
      const int y = idx / w;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int n = ny * w + nx;
          if (!seen[n] && data[n] == cls) {
            seen[n] = 1;
            stack.push_back(n);
          }
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace rinkreg::detail

#endif  // RINKREG_SRC_RASTER_UTIL_HPP_
