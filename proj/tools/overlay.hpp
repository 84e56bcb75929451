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

#ifndef RINKREG_TOOLS_OVERLAY_HPP_
#define RINKREG_TOOLS_OVERLAY_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rinkreg/homography.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg::cli {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kInitTone{140, 200, 255};   // light blue
inline constexpr Rgb kFinalTone{10, 45, 160};    // dark blue
inline constexpr Rgb kTruthTone{70, 210, 90};    // green

// Frame classes as muted greys with the template's line classes and rink
// outline drawn on top, warped by each available homography. Draw order is
// truth, initial, final. Returns interleaved RGB.
std::vector<std::uint8_t> RenderOverlay(const SegMap& frame, const SegMap& tmpl, const std::optional<Homography>& h_init,
                                        const std::optional<Homography>& h_final,
                                        const std::optional<Homography>& h_truth);

// True for classes drawn as template strokes.
bool IsStrokeClass(SegClass c);

}  // namespace rinkreg::cli

#endif  // RINKREG_TOOLS_OVERLAY_HPP_
