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

#include "rinkreg/camera_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rinkreg/errors.hpp"
#include "rinkreg/random.hpp"

namespace rinkreg {
namespace {

double Radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

Homography CameraHomography(const CameraPose& pose, const CameraRig& rig) {
  const double pan = Radians(pose.pan_deg);
  const double tilt = Radians(pose.tilt_deg);
  if (!(tilt > 0.0) || !(pose.coverage > 0.0)) throw DegenerateError("camera must look down with positive coverage");

  // East-north-up world with the origin at centre ice; template +y is south.
  const double s = std::max(rig.nominal_length_m / rig.template_size.width,
                            rig.nominal_width_m / rig.template_size.height);
  const Eigen::Vector3d centre(0.0, -(0.5 * rig.nominal_width_m + rig.setback_m), rig.height_m);
  const Eigen::Vector3d forward(std::sin(pan) * std::cos(tilt), std::cos(pan) * std::cos(tilt), -std::sin(tilt));
  const Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ()).normalized();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right;
  r.row(1) = down;
  r.row(2) = forward;

  const double slant = rig.height_m / std::sin(tilt);
  const double focal = rig.frame_size.width * slant / (pose.coverage * rig.nominal_length_m);
  Eigen::Matrix3d k;
  k << focal, 0, 0.5 * rig.frame_size.width, 0, focal, 0.5 * rig.frame_size.height, 0, 0, 1;

  // Ground point for template pixel (u, v): (s(u - cx), -s(v - cy), 0).
  const double tcx = 0.5 * rig.template_size.width;
  const double tcy = 0.5 * rig.template_size.height;
  Eigen::Matrix3d g;
  g.col(0) = s * r.col(0);
  g.col(1) = -s * r.col(1);
  g.col(2) = -tcx * s * r.col(0) + tcy * s * r.col(1) - r * centre;
  const Eigen::Matrix3d h = k * g;
  return Homography::FromMatrix({h(0, 0), h(0, 1), h(0, 2), h(1, 0), h(1, 1), h(1, 2), h(2, 0), h(2, 1), h(2, 2)});
}

std::vector<Homography> GenerateCameraPool(int count, std::uint64_t seed, const PoseRanges& ranges,
                                           const CameraRig& rig) {
  Rng rng(seed);
  std::vector<Homography> pool;
  pool.reserve(count);
  for (int i = 0; i < count; ++i) {
    CameraPose pose;
    pose.pan_deg = rng.Uniform(ranges.pan_min, ranges.pan_max);
    pose.tilt_deg = rng.Uniform(ranges.tilt_min, ranges.tilt_max);
    pose.coverage = rng.Uniform(ranges.coverage_min, ranges.coverage_max);
    pool.push_back(CameraHomography(pose, rig));
  }
  return pool;
}

std::vector<Homography> LoadCameraPool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open camera pool " + path);
  std::vector<Homography> pool;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::array<double, 9> m;
    int n = 0;
    while (n < 9 && ss >> m[n]) ++n;
    if (n == 0 && ss.eof()) continue;
    std::string rest;
    if (n != 9 || (ss >> rest)) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 9 reals");
    }
    try {
      pool.push_back(Homography::FromMatrix(m));
    } catch (const DegenerateError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (pool.empty()) throw ParseError("camera pool " + path + " is empty");
  return pool;
}

void SaveCameraPool(const std::string& path, const std::vector<Homography>& pool) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write camera pool " + path);
  out << "# Broadcast camera pool: template pixels (400x170) -> frame pixels (1280x720).\n"
      << "# One homography per line, row-major, m[2][2] = 1.\n";
  char buf[32];
  for (const auto& h : pool) {
    for (int i = 0; i < 9; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", h.entries()[i]);
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing camera pool " + path);
}

bool HasBroadcastOrientation(const Homography& h, Size2 frame_size) {
  // Jacobian of the frame -> template map at the frame centre.
  const Homography inv = Invert(h);
  const Point2 c{0.5 * frame_size.width, 0.5 * frame_size.height};
  const double eps = 1.0;
  const Point2 p = Apply(inv, c);
  const Point2 px = Apply(inv, {c.x + eps, c.y});
  const Point2 py = Apply(inv, {c.x, c.y + eps});
  const Point2 dx = px - p;
  const Point2 dy = py - p;
  return Cross(dx, dy) > 0.0 && dy.y > 0.0;
}

}  // namespace rinkreg
