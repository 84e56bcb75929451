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

#ifndef RINKREG_REGISTRATION_HPP_
#define RINKREG_REGISTRATION_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rinkreg/camera_model.hpp"
#include "rinkreg/errors.hpp"
#include "rinkreg/homography.hpp"
#include "rinkreg/rink_model.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg {

class InitFailed : public Error {
 public:
  InitFailed(const std::string& what, double best_overlap) : Error(what), best_overlap_(best_overlap) {}
  double best_overlap() const { return best_overlap_; }

 private:
  double best_overlap_;
};

struct FrameKeypoint {
  Point2 point;
  SegClass cls;
  KeypointTag tag;
};

// Landmark centroids and line/boundary intersections found in a frame
// segmentation. Components under 15 px or touching the frame border are
// ignored.
std::vector<FrameKeypoint> ExtractFrameKeypoints(const SegMap& seg);

// Per-class soft masks of a segmentation at a reduced working resolution,
// used to score candidate template -> frame homographies.
class MaskObjective {
 public:
  // `factor`: frame pixels per working pixel; `blur_px`: box kernel width.
  // `tmpl` is referenced, not copied, and must outlive the objective.
  MaskObjective(const SegMap& seg, const SegMap& tmpl, int factor, int blur_px = 5);
  MaskObjective(const SegMap& seg, SegMap&& tmpl, int factor, int blur_px = 5) = delete;

  // Mean per-class L1 distance between blurred one-hot masks, in [0, 1].
  double L1(const Homography& h) const;
  // Soft IoU over the non-Background classes, in [0, 1].
  double SoftIou(const Homography& h) const;

  int factor() const { return factor_; }
  int work_width() const { return ww_; }
  int work_height() const { return wh_; }

  // Half-open pixel rectangle on the working grid.
  struct Window {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  };

 private:
  void RenderTemplate(const Homography& h, std::vector<float>& planes, std::array<Window, kNumClasses>& windows) const;

  const SegMap* tmpl_;
  int factor_;
  int blur_;
  int ww_ = 0, wh_ = 0;
  std::vector<float> seg_planes_;  // kNumClasses planes, blurred; Background unused
  std::array<Window, kNumClasses> seg_win_{};  // nonzero support of each plane
  std::vector<float> uniform_radius_;  // template px to the nearest class change
};

struct InitConfig {
  int ransac_iters = 2000;
  double inlier_tol_px = 15.0;
  int min_keypoints = 4;
  int fallback_grid = 9;         // samples per camera-pose axis
  double min_overlap = 0.3;      // below this soft IoU the estimate fails
  double accept_overlap = 0.75;  // keypoint estimates below this also try the grid
  std::uint64_t seed = 0;
  CameraRig rig;                 // frame size is taken from the segmentation
  PoseRanges poses{-40.0, 40.0, 6.0, 22.0, 0.25, 1.0};
  void Validate() const;
};

enum class RefineObjective { kL1Mask, kSmoothL1CornersPlusL1Mask };

std::string_view RefineObjectiveName(RefineObjective o);
RefineObjective ParseRefineObjective(std::string_view name);

struct RefineConfig {
  double corner_step_px = 10.0;
  RefineObjective objective = RefineObjective::kL1Mask;
  int max_evals = 400;
  double accept_tol = 1e-3;
  int work_long_side = 256;    // working resolution of the mask objective
  int blur_px = 5;
  double corner_weight = 1e-3;  // smooth-L1 corner prior, per frame pixel
  void Validate() const;
};

struct InitEstimate {
  Homography h;
  double overlap = 0.0;  // soft IoU
  bool from_keypoints = false;
};

// Throws InitFailed when neither the keypoint nor the grid path reaches
// cfg.min_overlap.
InitEstimate EstimateInitial(const SegMap& seg, const RinkSpec& spec, const InitConfig& cfg = {},
                             Size2 template_size = kDefaultTemplateSize);

struct RefineResult {
  Homography h;
  double objective = 0.0;
  std::array<Point2, 4> displacement{};  // accepted corner shift
  int evals = 0;
};

RefineResult Refine(const SegMap& seg, const RinkSpec& spec, const Homography& h, const RefineConfig& cfg = {},
                    Size2 template_size = kDefaultTemplateSize);

enum class RegStatus { kConverged, kIterationCap, kInitFailed };

std::string_view RegStatusName(RegStatus s);
RegStatus ParseRegStatus(std::string_view name);

struct IterationRecord {
  Homography h;
  double objective = 0.0;
};

struct RegistrationResult {
  Homography h_init;
  Homography h_final;
  double init_objective = 0.0;
  std::vector<IterationRecord> iterations;
  RegStatus status = RegStatus::kIterationCap;

  // Estimate after k refinement rounds (k = 0 is h_init); rounds skipped by
  // early stopping repeat the last estimate.
  const Homography& AfterIterations(int k) const;
};

RegistrationResult Register(const SegMap& seg, const RinkSpec& spec, const InitConfig& init_cfg = {},
                            const RefineConfig& ref_cfg = {}, int n_iters = 3,
                            Size2 template_size = kDefaultTemplateSize);

// EMA over normalized homographies of the successful results, in order.
// Failed results pass the previous smoothed estimate through.
std::vector<Homography> SmoothSequence(const std::vector<RegistrationResult>& results, double alpha,
                                       const std::array<double, 8>& scales = DefaultNormalizationScales());

std::string RegistrationResultToJson(const RegistrationResult& r, const std::string& id = {});
RegistrationResult RegistrationResultFromJson(std::string_view line, std::string* id = nullptr);

}  // namespace rinkreg

#endif  // RINKREG_REGISTRATION_HPP_
