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

#include "rinkreg/seg_map.hpp"

#include <algorithm>
#include <string>

#include "rinkreg/errors.hpp"

namespace rinkreg {

std::string_view ClassName(SegClass c) {
  switch (c) {
    case SegClass::kBackground: return "Background";
    case SegClass::kBehindGoal: return "BehindGoal";
    case SegClass::kBlueLines: return "BlueLines";
    case SegClass::kCenterFaceoffCircle: return "CenterFaceoffCircle";
    case SegClass::kCenterLine: return "CenterLine";
    case SegClass::kOuterFaceoffCircles: return "OuterFaceoffCircles";
    case SegClass::kOuterFaceoffSpots: return "OuterFaceoffSpots";
    case SegClass::kGoalCreases: return "GoalCreases";
    case SegClass::kNeutralZone: return "NeutralZone";
    case SegClass::kInnerFaceoffSpots: return "InnerFaceoffSpots";
    case SegClass::kDefenseZones: return "DefenseZones";
  }
  return "Unknown";
}

SegMap::SegMap(int width, int height, SegClass fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw DimensionError("SegMap dimensions must be positive");
  data_.assign(static_cast<std::size_t>(width) * height, Index(fill));
}

SegMap::SegMap(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw DimensionError("SegMap dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("SegMap data size does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v >= kNumClasses; })) {
    throw ParseError("SegMap cell outside class range 0..10");
  }
}

std::array<std::size_t, kNumClasses> SegMap::Histogram() const {
  std::array<std::size_t, kNumClasses> h{};
  for (std::uint8_t v : data_) ++h[v];
  return h;
}

std::size_t SegMap::CountNonBackground() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace rinkreg
