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

#include "rinkreg/rink_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rinkreg/errors.hpp"
#include "rinkreg/random.hpp"

namespace rinkreg {
namespace {

// Four mirror images of (x, y), x, y >= 0, ordered top-left, top-right,
// bottom-right, bottom-left in the y-down template frame.
std::array<Point2, 4> MirrorQuad(double x, double y) {
  return {Point2{-x, -y}, Point2{x, -y}, Point2{x, y}, Point2{-x, y}};
}

bool InsideRoundedRect(double hx, double hy, double r, const Point2& p) {
  const double ax = std::abs(p.x);
  const double ay = std::abs(p.y);
  if (ax > hx || ay > hy) return false;
  const double cx = hx - r;
  const double cy = hy - r;
  if (ax <= cx || ay <= cy) return true;
  const double dx = ax - cx;
  const double dy = ay - cy;
  return dx * dx + dy * dy <= r * r;
}

// True when the closed disc (c, r) lies inside the boundary.
bool DiscInside(const RinkSpec& s, const Point2& c, double r) {
  const double hx = 0.5 * s.length - r;
  const double hy = 0.5 * s.width - r;
  if (hx < 0.0 || hy < 0.0) return false;
  if (r >= s.corner_radius) return std::abs(c.x) <= hx && std::abs(c.y) <= hy;
  return InsideRoundedRect(hx, hy, s.corner_radius - r, c);
}

bool InDisc(const Point2& p, const Point2& c, double r) {
  const double dx = p.x - c.x;
  const double dy = p.y - c.y;
  return dx * dx + dy * dy <= r * r;
}

bool IsMirrorSymmetric(const std::array<Point2, 4>& pts) {
  constexpr double kTol = 1e-12;
  auto has = [&](const Point2& q) {
    return std::any_of(pts.begin(), pts.end(), [&](const Point2& p) { return Distance(p, q) <= kTol; });
  };
  return std::all_of(pts.begin(), pts.end(), [&](const Point2& p) {
    return has({-p.x, p.y}) && has({p.x, -p.y}) && has({-p.x, -p.y});
  });
}

}  // namespace

double CreaseHalfWidth(const RinkSpec& spec) {
  return spec.crease_shape == CreaseShape::kTruncatedSemicircle ? spec.crease_radius * (2.0 / 3.0)
                                                                : spec.crease_radius;
}

std::vector<std::string> CheckInvariants(const RinkSpec& s) {
  std::vector<std::string> errs;
  auto require = [&](bool ok, const char* msg) {
    if (!ok) errs.emplace_back(msg);
  };
  const double fields[] = {s.length,
                           s.width,
                           s.corner_radius,
                           s.goal_line_offset,
                           s.blue_line_offset,
                           s.centre_circle_radius,
                           s.outer_faceoff_circle_radius,
                           s.outer_faceoff_spot_radius,
                           s.crease_radius,
                           s.goal_width,
                           s.blue_line_thickness,
                           s.centre_line_thickness};
  for (double v : fields) {
    if (!std::isfinite(v)) {
      errs.emplace_back("non-finite field");
      return errs;
    }
  }
  require(s.width > 0.0 && s.width < s.length, "require 0 < width < length");
  require(s.corner_radius >= 0.0 && s.corner_radius <= 0.5 * s.width, "require 0 <= corner_radius <= width/2");
  require(s.goal_line_offset > 0.0, "goal_line_offset must be positive");
  require(s.blue_line_offset > 0.0, "blue_line_offset must be positive");
  require(s.goal_line_offset < 0.5 * s.length - s.blue_line_offset,
          "goal lines must lie between the end boards and the blue lines");
  require(s.centre_circle_radius > 0.0 && s.outer_faceoff_circle_radius > 0.0 &&
              s.outer_faceoff_spot_radius > 0.0 && s.crease_radius > 0.0,
          "radii must be positive");
  require(s.blue_line_thickness > 0.0 && s.centre_line_thickness > 0.0, "line thickness must be positive");
  require(IsMirrorSymmetric(s.outer_faceoff_centres), "outer faceoff centres are not mirror symmetric");
  require(IsMirrorSymmetric(s.inner_faceoff_spots), "inner faceoff spots are not mirror symmetric");
  for (const auto& c : s.outer_faceoff_centres) {
    require(DiscInside(s, c, s.outer_faceoff_circle_radius), "outer faceoff circle leaves the rink");
  }
  for (const auto& c : s.inner_faceoff_spots) {
    require(DiscInside(s, c, s.outer_faceoff_spot_radius), "inner faceoff spot leaves the rink");
  }
  require(DiscInside(s, {0.0, 0.0}, s.centre_circle_radius), "centre circle leaves the rink");
  require(s.crease_radius < 0.5 * s.length - s.goal_line_offset - s.blue_line_offset,
          "crease reaches the blue line");
  require(DiscInside(s, {0.5 * s.length - s.goal_line_offset, 0.0}, 0.0), "goal line centre outside rink");
  return errs;
}

bool IsValid(const RinkSpec& spec) { return CheckInvariants(spec).empty(); }

RinkSpec PresetSpec(RinkPreset kind) {
  RinkSpec s;
  if (kind == RinkPreset::kNHL) {
    // 200 x 85 ft.
    s.length = 60.96;
    s.width = 25.91;
    s.corner_radius = 8.53;
    s.goal_line_offset = 3.35;
    s.blue_line_offset = 7.62;
    s.centre_circle_radius = 4.57;
    s.outer_faceoff_circle_radius = 4.57;
    s.outer_faceoff_centres = MirrorQuad(21.03, 6.71);
    s.inner_faceoff_spots = MirrorQuad(6.10, 6.71);
    s.outer_faceoff_spot_radius = 0.305;
    s.crease_shape = CreaseShape::kTruncatedSemicircle;
    s.crease_radius = 1.83;
    s.goal_width = 1.83;
    s.blue_line_thickness = 0.305;
    s.centre_line_thickness = 0.305;
  } else {
    s.length = 60.0;
    s.width = 30.0;
    s.corner_radius = 8.5;
    s.goal_line_offset = 4.0;
    s.blue_line_offset = 8.77;
    s.centre_circle_radius = 4.5;
    s.outer_faceoff_circle_radius = 4.5;
    s.outer_faceoff_centres = MirrorQuad(20.0, 7.0);
    s.inner_faceoff_spots = MirrorQuad(7.27, 7.0);
    s.outer_faceoff_spot_radius = 0.3;
    s.crease_shape = CreaseShape::kSemicircle;
    s.crease_radius = 1.83;
    s.goal_width = 1.83;
    s.blue_line_thickness = 0.30;
    s.centre_line_thickness = 0.30;
  }
  return s;
}

RinkSpec Reflect(const RinkSpec& spec, bool about_long_axis) {
  RinkSpec out = spec;
  auto flip = [&](Point2 p) { return about_long_axis ? Point2{p.x, -p.y} : Point2{-p.x, p.y}; };
  for (auto& p : out.outer_faceoff_centres) p = flip(p);
  for (auto& p : out.inner_faceoff_spots) p = flip(p);
  return out;
}

RinkSpec RandomSpec(std::uint64_t seed, const RandomizationRanges& r) {
  const Interval all[] = {r.length,
                          r.width,
                          r.corner_radius_fraction,
                          r.goal_line_offset,
                          r.blue_line_offset,
                          r.centre_circle_radius,
                          r.outer_faceoff_circle_radius,
                          r.outer_faceoff_from_goal_line,
                          r.outer_faceoff_y_fraction,
                          r.inner_spot_from_blue_line,
                          r.spot_radius,
                          r.crease_radius};
  for (const auto& iv : all) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi || iv.lo < 0.0) {
      throw RangeError("randomization interval must satisfy 0 <= lo <= hi");
    }
  }
  if (!(r.line_thickness > 0.0) || !(r.goal_width > 0.0)) {
    throw RangeError("line thickness and goal width must be positive");
  }

  Rng rng(seed);
  auto draw = [&](const Interval& iv) { return rng.Uniform(iv.lo, iv.hi); };
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RinkSpec s;
    s.length = draw(r.length);
    s.width = draw(r.width);
    s.corner_radius = draw(r.corner_radius_fraction) * 0.5 * s.width;
    s.goal_line_offset = draw(r.goal_line_offset);
    s.blue_line_offset = draw(r.blue_line_offset);
    s.centre_circle_radius = draw(r.centre_circle_radius);
    s.outer_faceoff_circle_radius = draw(r.outer_faceoff_circle_radius);
    const double goal_x = 0.5 * s.length - s.goal_line_offset;
    const double outer_x = goal_x - draw(r.outer_faceoff_from_goal_line);
    const double faceoff_y = draw(r.outer_faceoff_y_fraction) * 0.5 * s.width;
    s.outer_faceoff_centres = MirrorQuad(outer_x, faceoff_y);
    s.inner_faceoff_spots = MirrorQuad(s.blue_line_offset - draw(r.inner_spot_from_blue_line), faceoff_y);
    s.outer_faceoff_spot_radius = draw(r.spot_radius);
    s.crease_shape = rng.Bernoulli(0.5) ? CreaseShape::kSemicircle : CreaseShape::kTruncatedSemicircle;
    s.crease_radius = draw(r.crease_radius);
    s.goal_width = r.goal_width;
    s.blue_line_thickness = r.line_thickness;
    s.centre_line_thickness = r.line_thickness;
    if (IsValid(s)) return s;
  }
  throw RangeError("randomization ranges produce invalid rink geometry");
}

Point2 TemplateFrame::ToPixels(const Point2& m) const {
  return {0.5 * width + m.x / metres_per_pixel, 0.5 * height + m.y / metres_per_pixel};
}

Point2 TemplateFrame::ToMetres(const Point2& p) const {
  return {(p.x - 0.5 * width) * metres_per_pixel, (p.y - 0.5 * height) * metres_per_pixel};
}

TemplateFrame FitTemplate(const RinkSpec& spec, Size2 size) {
  if (size.width <= 0 || size.height <= 0) throw DimensionError("template size must be positive");
  TemplateFrame f;
  f.width = size.width;
  f.height = size.height;
  f.metres_per_pixel = std::max(spec.length / size.width, spec.width / size.height);
  return f;
}

bool InsideBoundary(const RinkSpec& spec, const Point2& m) {
  return InsideRoundedRect(0.5 * spec.length, 0.5 * spec.width, spec.corner_radius, m);
}

SegClass ClassifyPoint(const RinkSpec& s, const Point2& p) {
  if (!InsideBoundary(s, p)) return SegClass::kBackground;
  for (const auto& c : s.outer_faceoff_centres) {
    if (InDisc(p, c, s.outer_faceoff_spot_radius)) return SegClass::kOuterFaceoffSpots;
  }
  for (const auto& c : s.inner_faceoff_spots) {
    if (InDisc(p, c, s.outer_faceoff_spot_radius)) return SegClass::kInnerFaceoffSpots;
  }
  if (InDisc(p, {0.0, 0.0}, s.centre_circle_radius)) return SegClass::kCenterFaceoffCircle;
  for (const auto& c : s.outer_faceoff_centres) {
    if (InDisc(p, c, s.outer_faceoff_circle_radius)) return SegClass::kOuterFaceoffCircles;
  }
  const double ax = std::abs(p.x);
  if (ax <= 0.5 * s.centre_line_thickness) return SegClass::kCenterLine;
  if (std::abs(ax - s.blue_line_offset) <= 0.5 * s.blue_line_thickness) return SegClass::kBlueLines;
  const double goal_x = 0.5 * s.length - s.goal_line_offset;
  if (ax <= goal_x && std::abs(p.y) <= CreaseHalfWidth(s) && InDisc({ax, p.y}, {goal_x, 0.0}, s.crease_radius)) {
    return SegClass::kGoalCreases;
  }
  if (ax < s.blue_line_offset) return SegClass::kNeutralZone;
  if (ax <= goal_x) return SegClass::kDefenseZones;
  return SegClass::kBehindGoal;
}

SegMap Rasterize(const RinkSpec& spec, int width, int height) {
  const TemplateFrame frame = FitTemplate(spec, {width, height});
  SegMap out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.set(x, y, ClassifyPoint(spec, frame.ToMetres({x + 0.5, y + 0.5})));
    }
  }
  out.pixel_scale = frame.metres_per_pixel;
  out.origin = frame.ToMetres({0.0, 0.0});
  return out;
}

std::vector<Point2> BoundaryPolygon(const RinkSpec& spec, const TemplateFrame& frame, int arc_segments) {
  const double hx = 0.5 * spec.length;
  const double hy = 0.5 * spec.width;
  const double r = spec.corner_radius;
  const double cx = hx - r;
  const double cy = hy - r;
  // Corner arc centres and their starting angles, walking the boundary with
  // increasing angle.
  const Point2 centres[4] = {{cx, cy}, {-cx, cy}, {-cx, -cy}, {cx, -cy}};
  std::vector<Point2> poly;
  poly.reserve(4 * (arc_segments + 1));
  for (int k = 0; k < 4; ++k) {
    const double a0 = k * 0.5 * std::numbers::pi;
    for (int i = 0; i <= arc_segments; ++i) {
      const double a = a0 + 0.5 * std::numbers::pi * i / arc_segments;
      const Point2 m{centres[k].x + r * std::cos(a), centres[k].y + r * std::sin(a)};
      const Point2 px = frame.ToPixels(m);
      if (poly.empty() || Distance(poly.back(), px) > 1e-12) poly.push_back(px);
    }
  }
  if (poly.size() > 1 && Distance(poly.front(), poly.back()) <= 1e-12) poly.pop_back();
  return poly;
}

std::string_view TagName(KeypointTag tag) {
  switch (tag) {
    case KeypointTag::kOuterFaceoffCentre: return "OuterFaceoffCentre";
    case KeypointTag::kInnerFaceoffSpot: return "InnerFaceoffSpot";
    case KeypointTag::kCentreCircleCentre: return "CentreCircleCentre";
    case KeypointTag::kBlueLineEnd: return "BlueLineEnd";
    case KeypointTag::kCentreLineEnd: return "CentreLineEnd";
    case KeypointTag::kGoalLineEnd: return "GoalLineEnd";
  }
  return "Unknown";
}

std::vector<Keypoint> TemplateKeypoints(const RinkSpec& spec, Size2 size) {
  const TemplateFrame f = FitTemplate(spec, size);
  std::vector<Keypoint> kps;
  for (const auto& c : spec.outer_faceoff_centres) {
    kps.push_back({f.ToPixels(c), SegClass::kOuterFaceoffSpots, KeypointTag::kOuterFaceoffCentre});
  }
  for (const auto& c : spec.inner_faceoff_spots) {
    kps.push_back({f.ToPixels(c), SegClass::kInnerFaceoffSpots, KeypointTag::kInnerFaceoffSpot});
  }
  kps.push_back({f.ToPixels({0.0, 0.0}), SegClass::kCenterFaceoffCircle, KeypointTag::kCentreCircleCentre});
  const double hy = 0.5 * spec.width;
  for (const auto& p : MirrorQuad(spec.blue_line_offset, hy)) {
    kps.push_back({f.ToPixels(p), SegClass::kBlueLines, KeypointTag::kBlueLineEnd});
  }
  kps.push_back({f.ToPixels({0.0, -hy}), SegClass::kCenterLine, KeypointTag::kCentreLineEnd});
  kps.push_back({f.ToPixels({0.0, hy}), SegClass::kCenterLine, KeypointTag::kCentreLineEnd});
  const double goal_x = 0.5 * spec.length - spec.goal_line_offset;
  const double straight_x = 0.5 * spec.length - spec.corner_radius;
  double goal_y = hy;
  if (goal_x > straight_x) {
    const double dx = goal_x - straight_x;
    goal_y = hy - spec.corner_radius + std::sqrt(std::max(0.0, spec.corner_radius * spec.corner_radius - dx * dx));
  }
  for (const auto& p : MirrorQuad(goal_x, goal_y)) {
    kps.push_back({f.ToPixels(p), SegClass::kDefenseZones, KeypointTag::kGoalLineEnd});
  }
  return kps;
}

}  // namespace rinkreg
