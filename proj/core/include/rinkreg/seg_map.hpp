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

#ifndef RINKREG_SEG_MAP_HPP_
#define RINKREG_SEG_MAP_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rinkreg/geometry.hpp"

namespace rinkreg {

// Rink feature classes. Indices are part of every on-disk format.
enum class SegClass : std::uint8_t {
  kBackground = 0,
  kBehindGoal = 1,
  kBlueLines = 2,
  kCenterFaceoffCircle = 3,
  kCenterLine = 4,
  kOuterFaceoffCircles = 5,
  kOuterFaceoffSpots = 6,
  kGoalCreases = 7,
  kNeutralZone = 8,
  kInnerFaceoffSpots = 9,
  kDefenseZones = 10,
};

inline constexpr int kNumClasses = 11;

std::string_view ClassName(SegClass c);

constexpr std::uint8_t Index(SegClass c) { return static_cast<std::uint8_t>(c); }

// Row-major raster of class indices. `pixel_scale` (metres per pixel) and
// `origin` (rink-frame metres of the top-left corner) are set for overhead
// templates and empty for frame-space segmentations.
class SegMap {
 public:
  SegMap(int width, int height, SegClass fill = SegClass::kBackground);
  SegMap(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, std::uint8_t c) { data_[static_cast<std::size_t>(y) * width_ + x] = c; }
  void set(int x, int y, SegClass c) { set(x, y, Index(c)); }
  SegClass class_at(int x, int y) const { return static_cast<SegClass>(at(x, y)); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> mutable_data() { return data_; }

  std::optional<double> pixel_scale;
  std::optional<Point2> origin;

  std::array<std::size_t, kNumClasses> Histogram() const;
  std::size_t CountNonBackground() const;

  bool operator==(const SegMap& other) const {
    return width_ == other.width_ && height_ == other.height_ && data_ == other.data_;
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

}  // namespace rinkreg

#endif  // RINKREG_SEG_MAP_HPP_
