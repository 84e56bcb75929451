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

#ifndef RINKREG_METRICS_HPP_
#define RINKREG_METRICS_HPP_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rinkreg/geometry.hpp"
#include "rinkreg/homography.hpp"
#include "rinkreg/rink_model.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg {

struct ClassIou {
  std::array<double, kNumClasses> per_class{};
  std::array<bool, kNumClasses> present{};  // class occurs in either raster
  double mean = 0.0;                         // over present classes
};

// Throws DimensionError when the rasters differ in size.
ClassIou ComputeClassIou(const SegMap& a, const SegMap& b);

// a*x + b*y + c >= 0
struct HalfPlane {
  double a = 0.0, b = 0.0, c = 0.0;
};

double PolygonArea(std::span<const Point2> poly);  // signed, CCW positive in a y-up frame

// Sutherland-Hodgman against one half-plane; `poly` must be convex.
std::vector<Point2> ClipPolygon(std::span<const Point2> poly, const HalfPlane& hp);

// Template-space half-planes whose intersection is the part of the template
// plane seen inside the frame (front side of the camera only).
std::array<HalfPlane, 4> FrameFootprint(const Homography& h, Size2 frame_size);

enum class ClipMode { kRink, kTemplate };

std::string_view ClipModeName(ClipMode mode);
ClipMode ParseClipMode(std::string_view name);  // std::invalid_argument on unknown names

// Region of template pixels a clipped footprint is intersected with.
std::vector<Point2> ClipRegion(const RinkSpec& spec, ClipMode mode, Size2 template_size = kDefaultTemplateSize);

// Visible part of the clip region under h, as a convex polygon.
std::vector<Point2> VisiblePolygon(const Homography& h, Size2 frame_size, std::span<const Point2> region);

// Area IoU of the two visible regions; 0 when the union is empty.
double IouPart(const Homography& h_pred, const Homography& h_gt, Size2 frame_size, const RinkSpec& spec,
               ClipMode mode = ClipMode::kRink, Size2 template_size = kDefaultTemplateSize);

struct SampleScore {
  std::string id;
  double iou_part = 0.0;
  bool failed = false;  // no homography was predicted; scored as 0
};

struct Aggregate {
  std::size_t count = 0;
  std::size_t failed = 0;
  double mean = 0.0;
  double median = 0.0;
  double frac_ge_090 = 0.0;
  double frac_ge_095 = 0.0;
};

Aggregate Summarize(std::span<const SampleScore> scores);

struct EvalReport {
  std::string label;
  ClipMode clip = ClipMode::kRink;
  std::vector<SampleScore> per_sample;
  Aggregate aggregate;
  std::string config_hash;
};

struct EvalItem {
  std::string id;
  Homography h_gt;
  const RinkSpec* spec = nullptr;
  Size2 frame_size;
};

// Predictions keyed by id; std::nullopt marks a sample whose registration
// failed. Throws MissingPrediction listing manifest ids with no prediction and
// ParseError for predictions naming unknown ids.
EvalReport Evaluate(std::span<const EvalItem> items, const std::map<std::string, std::optional<Homography>>& predictions,
                    ClipMode mode = ClipMode::kRink, int jobs = 1, Size2 template_size = kDefaultTemplateSize);

std::string ReportToJson(const EvalReport& report);
EvalReport ReportFromJson(std::string_view text);
std::string ReportToTable(std::span<const EvalReport> reports);

std::string Sha256Hex(std::string_view bytes);

}  // namespace rinkreg

#endif  // RINKREG_METRICS_HPP_
