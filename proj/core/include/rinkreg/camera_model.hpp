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

#ifndef RINKREG_CAMERA_MODEL_HPP_
#define RINKREG_CAMERA_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rinkreg/geometry.hpp"
#include "rinkreg/homography.hpp"

namespace rinkreg {

inline constexpr Size2 kDefaultFrameSize{1280, 720};

// Elevated centre-ice broadcast camera. Angles in degrees; `coverage` is the
// horizontal ground footprint at the principal ray, as a fraction of the
// nominal rink length.
struct CameraPose {
  double pan_deg = 0.0;
  double tilt_deg = 14.0;
  double coverage = 0.6;
};

// Fixed rig geometry. The ground plane is the shared template pixel space,
// interpreted with the NHL template scale.
struct CameraRig {
  double height_m = 6.0;
  double setback_m = 12.0;  // horizontal distance behind the near boards
  double nominal_length_m = 60.96;
  double nominal_width_m = 25.91;
  Size2 template_size{400, 170};
  Size2 frame_size = kDefaultFrameSize;
};

struct PoseRanges {
  double pan_min = -35.0, pan_max = 35.0;
  double tilt_min = 8.0, tilt_max = 20.0;
  double coverage_min = 0.3, coverage_max = 0.9;
};

// Template-pixel -> frame-pixel homography seen by the camera.
Homography CameraHomography(const CameraPose& pose, const CameraRig& rig = {});

inline constexpr std::uint64_t kCameraPoolSeed = 20240917;
inline constexpr int kCameraPoolSize = 500;

// Uniform draws over `ranges`, deterministic in the seed.
std::vector<Homography> GenerateCameraPool(int count = kCameraPoolSize, std::uint64_t seed = kCameraPoolSeed,
                                           const PoseRanges& ranges = {}, const CameraRig& rig = {});

// One homography per line, 9 whitespace-separated reals; '#' starts a comment.
std::vector<Homography> LoadCameraPool(const std::string& path);
void SaveCameraPool(const std::string& path, const std::vector<Homography>& pool);

// True when h agrees with the rig's viewing convention at the frame centre:
// not mirrored, and moving down the frame moves toward the near boards.
bool HasBroadcastOrientation(const Homography& h, Size2 frame_size = kDefaultFrameSize);

}  // namespace rinkreg

#endif  // RINKREG_CAMERA_MODEL_HPP_
