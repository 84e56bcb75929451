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

#ifndef RINKREG_RINK_MODEL_HPP_
#define RINKREG_RINK_MODEL_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rinkreg/geometry.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg {

enum class CreaseShape { kSemicircle, kTruncatedSemicircle };

enum class RinkPreset { kNHL, kIIHF };

// Parametric rink in metres. Rink frame: origin at centre ice, +x along the
// length, +y along the width. All features are mirrored about both axes.
struct RinkSpec {
  double length = 0.0;
  double width = 0.0;
  double corner_radius = 0.0;
  double goal_line_offset = 0.0;  // from the end boards
  double blue_line_offset = 0.0;  // from the centre line
  double centre_circle_radius = 0.0;
  double outer_faceoff_circle_radius = 0.0;
  std::array<Point2, 4> outer_faceoff_centres{};
  std::array<Point2, 4> inner_faceoff_spots{};
  double outer_faceoff_spot_radius = 0.0;  // also used for the inner spots
  CreaseShape crease_shape = CreaseShape::kSemicircle;
  double crease_radius = 0.0;
  double goal_width = 0.0;
  double blue_line_thickness = 0.0;
  double centre_line_thickness = 0.0;

  friend bool operator==(const RinkSpec&, const RinkSpec&) = default;
};

// Half-width of the straight crease sides for truncated creases.
double CreaseHalfWidth(const RinkSpec& spec);

// Returns an empty vector when every invariant holds, otherwise one message
// per violation.
std::vector<std::string> CheckInvariants(const RinkSpec& spec);
bool IsValid(const RinkSpec& spec);

RinkSpec PresetSpec(RinkPreset kind);

// Mirror about the centre line (`about_long_axis` false) or about the long
// axis (true).
RinkSpec Reflect(const RinkSpec& spec, bool about_long_axis);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Each field is sampled uniformly and independently. Positions are stored
// relative to other features so that "rough positions" stay constant.
struct RandomizationRanges {
  Interval length{56.0, 64.0};
  Interval width{24.5, 31.5};
  Interval corner_radius_fraction{0.55, 0.72};  // of width / 2
  Interval goal_line_offset{3.35 * 0.9, 3.35 * 1.1};
  Interval blue_line_offset{7.62 * 0.9, 7.62 * 1.1};
  Interval centre_circle_radius{4.57 * 0.9, 4.57 * 1.1};
  Interval outer_faceoff_circle_radius{4.57 * 0.9, 4.57 * 1.1};
  Interval outer_faceoff_from_goal_line{6.10 * 0.9, 6.10 * 1.1};
  Interval outer_faceoff_y_fraction{0.518 * 0.9, 0.518 * 1.1};  // of width / 2
  Interval inner_spot_from_blue_line{1.52 * 0.9, 1.52 * 1.1};
  Interval spot_radius{0.305 * 0.9, 0.305 * 1.1};
  Interval crease_radius{1.83 * 0.9, 1.83 * 1.1};
  double line_thickness = 0.305;
  double goal_width = 1.83;
};

// Deterministic in (seed, ranges). Throws RangeError when the ranges are
// malformed or 64 consecutive draws violate the invariants.
RinkSpec RandomSpec(std::uint64_t seed, const RandomizationRanges& ranges = {});

// Mapping between rink metres and template pixels: the rink is centred and
// uniformly scaled to fit the raster.
struct TemplateFrame {
  int width = 400;
  int height = 170;
  double metres_per_pixel = 0.0;

  Point2 ToPixels(const Point2& metres) const;
  Point2 ToMetres(const Point2& pixels) const;
};

inline constexpr Size2 kDefaultTemplateSize{400, 170};

TemplateFrame FitTemplate(const RinkSpec& spec, Size2 size = kDefaultTemplateSize);

// Class of the topmost feature covering a rink-frame point. Z-order:
// spots > circles > lines > creases > zones > behind-goal > background.
SegClass ClassifyPoint(const RinkSpec& spec, const Point2& metres);

// Pixel-centre classification of every template pixel.
SegMap Rasterize(const RinkSpec& spec, int width = 400, int height = 170);

// True when `metres` lies inside the rounded-rectangle boundary.
bool InsideBoundary(const RinkSpec& spec, const Point2& metres);

// Rounded-rectangle boundary polygon in template pixels, counter-clockwise
// in the y-down raster frame, `arc_segments` chords per corner.
std::vector<Point2> BoundaryPolygon(const RinkSpec& spec, const TemplateFrame& frame,
                                    int arc_segments = 64);

enum class KeypointTag : std::uint8_t {
  kOuterFaceoffCentre,
  kInnerFaceoffSpot,
  kCentreCircleCentre,
  kBlueLineEnd,
  kCentreLineEnd,
  kGoalLineEnd,
};

inline constexpr int kNumKeypointTags = 6;

std::string_view TagName(KeypointTag tag);

struct Keypoint {
  Point2 point;  // template pixels
  SegClass cls;
  KeypointTag tag;
};

// Named landmarks in template pixels. Line ends lie on the boundary.
std::vector<Keypoint> TemplateKeypoints(const RinkSpec& spec, Size2 size = kDefaultTemplateSize);

}  // namespace rinkreg

#endif  // RINKREG_RINK_MODEL_HPP_
