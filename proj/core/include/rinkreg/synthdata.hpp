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

#ifndef RINKREG_SYNTHDATA_HPP_
#define RINKREG_SYNTHDATA_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rinkreg/camera_model.hpp"
#include "rinkreg/homography.hpp"
#include "rinkreg/rink_model.hpp"
#include "rinkreg/seg_map.hpp"

namespace rinkreg {

struct HAugmentConfig {
  double perturb_px = 8.0;  // max corner jitter, frame pixels
  Interval zoom_range{0.9, 1.1};
  // Off by default: on a doubly symmetric template a mirrored frame has the
  // same segmentation as an un-mirrored camera panned to the other end.
  double flip_prob = 0.0;
  std::vector<Homography> base_pool;
  Size2 frame_size = kDefaultFrameSize;
};

void Validate(const HAugmentConfig& cfg);

struct CornerPerturbConfig {
  Quad rect = RectCorners(0, 0, kDefaultFrameSize.width, kDefaultFrameSize.height);
  double max_shift = 0.05 * kDefaultFrameSize.width;
};

// flip (frame side) -> zoom about the frame centre -> four-corner jitter.
// Throws DegenerateError if 16 jitter draws in a row are degenerate.
Homography AugmentHomography(const Homography& base, const HAugmentConfig& cfg, std::uint64_t seed);

struct PerturbedHomography {
  Homography h;
  std::array<Point2, 4> delta;
};

// h_pert = FromFourPoints(rect, rect + delta) ∘ h with delta uniform in
// [-max_shift, max_shift]^2 per corner.
PerturbedHomography PerturbCorners(const Homography& h, const CornerPerturbConfig& cfg, std::uint64_t seed);

struct OcclusionBlob {
  int cx = 0;  // pixel holding the ellipse centre
  int cy = 0;
  int width = 0;  // full width; full height is 2.5 * width
};

// The blobs CorruptOcclusion stamps for these arguments.
std::vector<OcclusionBlob> DrawOcclusionBlobs(const SegMap& seg, int n_blobs, Interval width_range_px,
                                              std::uint64_t seed);

// Player-like occluders: upright Background ellipses with 1:2.5 aspect,
// centred on pixel centres of in-rink (non-Background) pixels. Widths are
// integers drawn from `width_range_px`.
SegMap CorruptOcclusion(const SegMap& seg, int n_blobs, Interval width_range_px, std::uint64_t seed);

// Each pixel is, with probability `rate`, reassigned a uniformly random class.
SegMap CorruptSpeckle(const SegMap& seg, double rate, std::uint64_t seed);

// Resamples the raster through a smooth random displacement field with
// |d| <= max_shift_px, then (optionally) deletes each small spot component
// with probability 0.1.
SegMap CorruptEdges(const SegMap& seg, double max_shift_px, std::uint64_t seed, bool delete_spots = false);

struct CorruptionProfile {
  std::string name = "clean";
  int n_blobs = 0;
  Interval blob_width_px{12.0, 36.0};
  double speckle_rate = 0.0;
  double edge_shift_px = 0.0;
  bool delete_spots = false;
};

// "clean", "mild", "heavy". Throws std::invalid_argument for other names.
CorruptionProfile NamedProfile(const std::string& name);

struct CorruptionRecord {
  std::string op;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
};

// Applies edges, occlusion, then speckle; appends one record per applied op.
SegMap ApplyProfile(const SegMap& seg, const CorruptionProfile& profile, std::uint64_t seed,
                    std::vector<CorruptionRecord>* log);

struct SpecEntry {
  std::string id;
  std::string file;  // path recorded in the manifest
  RinkSpec spec;
};

struct SyntheticSample {
  std::string id;
  std::string spec_id;
  std::string spec_file;
  Homography gt_h;  // template -> frame
  SegMap frame_seg;
  std::vector<CorruptionRecord> corruption_log;
  std::uint64_t seed = 0;
  int resample_count = 0;  // all-Background draws rejected before this one
};

struct DatasetConfig {
  std::vector<SpecEntry> specs;
  int n_per_spec = 1;
  HAugmentConfig h_cfg;
  CorruptionProfile profile;
  Size2 template_size = kDefaultTemplateSize;
  std::uint64_t seed = 0;
};

// Sample `index` (spec index * n_per_spec + draw) of the dataset; pure and
// deterministic in (cfg, index).
SyntheticSample GenerateSample(const DatasetConfig& cfg, std::size_t index);
SyntheticSample GenerateSample(const DatasetConfig& cfg, std::size_t index, const SegMap& tmpl);

std::size_t DatasetSize(const DatasetConfig& cfg);

// Generates every sample with a pool of `jobs` workers; output order is the
// index order regardless of scheduling.
std::vector<SyntheticSample> MakeDataset(const DatasetConfig& cfg, int jobs = 1);

// Per-entry population standard deviation of `draws` augmented homographies,
// draw i picking pool entry Rng(ChildSeed(99, i)).Below(pool size) and
// augmenting with seed ChildSeed(7, i). With the default pool and 10,000
// draws this reproduces DefaultNormalizationScales().
std::array<double, 8> CalibrateNormalizationScales(const HAugmentConfig& cfg, int draws = 10000);

}  // namespace rinkreg

#endif  // RINKREG_SYNTHDATA_HPP_
