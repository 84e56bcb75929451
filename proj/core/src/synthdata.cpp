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

#include "rinkreg/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "raster_util.hpp"
#include "rinkreg/errors.hpp"
#include "rinkreg/random.hpp"

namespace rinkreg {
namespace {

void ValidateKnobs(const HAugmentConfig& cfg) {
  if (!(cfg.perturb_px >= 0.0)) throw std::invalid_argument("perturb_px must be >= 0");
  if (!(cfg.zoom_range.lo > 0.0) || !(cfg.zoom_range.lo <= cfg.zoom_range.hi) || !std::isfinite(cfg.zoom_range.hi)) {
    throw std::invalid_argument("zoom_range must be a finite positive interval");
  }
  if (!(cfg.flip_prob >= 0.0 && cfg.flip_prob <= 1.0)) throw std::invalid_argument("flip_prob must be in [0,1]");
  if (cfg.frame_size.width <= 0 || cfg.frame_size.height <= 0) {
    throw std::invalid_argument("frame size must be positive");
  }
}

Homography ZoomAbout(double zoom, double cx, double cy) {
  return Homography::FromMatrix({zoom, 0, cx * (1 - zoom), 0, zoom, cy * (1 - zoom), 0, 0, 1});
}

constexpr std::uint8_t kSpotClasses[] = {Index(SegClass::kOuterFaceoffSpots), Index(SegClass::kInnerFaceoffSpots)};
constexpr std::size_t kMaxDeletableSpotPixels = 2500;
constexpr double kSpotDeleteProb = 0.1;
constexpr int kFieldSpacingPx = 64;

}  // namespace

void Validate(const HAugmentConfig& cfg) {
  ValidateKnobs(cfg);
  if (cfg.base_pool.empty()) throw std::invalid_argument("base_pool must not be empty");
}

Homography AugmentHomography(const Homography& base, const HAugmentConfig& cfg, std::uint64_t seed) {
  ValidateKnobs(cfg);
  Rng rng(seed);
  const double w = cfg.frame_size.width;
  const double h = cfg.frame_size.height;

  Homography out = base;
  if (rng.Bernoulli(cfg.flip_prob)) {
    out = Compose(Homography::FromMatrix({-1, 0, w, 0, 1, 0, 0, 0, 1}), out);
  }
  const double zoom = rng.Uniform(cfg.zoom_range.lo, cfg.zoom_range.hi);
  if (zoom != 1.0) out = Compose(ZoomAbout(zoom, 0.5 * w, 0.5 * h), out);
  if (cfg.perturb_px == 0.0) return out;

  const Quad corners = RectCorners(0, 0, w, h);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Quad moved = corners;
    for (auto& p : moved) {
      p.x += rng.Uniform(-cfg.perturb_px, cfg.perturb_px);
      p.y += rng.Uniform(-cfg.perturb_px, cfg.perturb_px);
    }
    try {
      return Compose(FromFourPoints(corners, moved), out);
    } catch (const DegenerateError&) {
    }
  }
  throw DegenerateError("corner jitter stayed degenerate after 16 draws");
}

PerturbedHomography PerturbCorners(const Homography& h, const CornerPerturbConfig& cfg, std::uint64_t seed) {
  if (!(cfg.max_shift >= 0.0)) throw std::invalid_argument("max_shift must be >= 0");
  Rng rng(seed);
  PerturbedHomography out{h, {}};
  for (auto& d : out.delta) {
    d.x = rng.Uniform(-cfg.max_shift, cfg.max_shift);
    d.y = rng.Uniform(-cfg.max_shift, cfg.max_shift);
  }
  if (cfg.max_shift == 0.0) {
    out.delta = {};
    return out;
  }
  Quad moved = cfg.rect;
  for (int i = 0; i < 4; ++i) moved[i] += out.delta[i];
  out.h = Compose(FromFourPoints(cfg.rect, moved), h);
  return out;
}

std::vector<OcclusionBlob> DrawOcclusionBlobs(const SegMap& seg, int n_blobs, Interval width_range_px,
                                              std::uint64_t seed) {
  if (n_blobs < 0) throw std::invalid_argument("n_blobs must be >= 0");
  std::vector<OcclusionBlob> blobs;
  if (n_blobs == 0) return blobs;
  const int wmin = std::max(1, static_cast<int>(std::ceil(width_range_px.lo)));
  const int wmax = std::max(wmin, static_cast<int>(std::floor(width_range_px.hi)));

  std::vector<int> in_rink;
  const auto data = seg.data();
  for (int i = 0; i < static_cast<int>(data.size()); ++i)
    if (data[i] != 0) in_rink.push_back(i);

  Rng rng(seed);
  for (int b = 0; b < n_blobs; ++b) {
    const int width = wmin + static_cast<int>(rng.Below(static_cast<std::uint64_t>(wmax - wmin + 1)));
    const int idx = in_rink.empty() ? static_cast<int>(rng.Below(seg.size()))
                                    : in_rink[rng.Below(in_rink.size())];
    blobs.push_back({idx % seg.width(), idx / seg.width(), width});
  }
  return blobs;
}

SegMap CorruptOcclusion(const SegMap& seg, int n_blobs, Interval width_range_px, std::uint64_t seed) {
  SegMap out = seg;
  for (const auto& blob : DrawOcclusionBlobs(seg, n_blobs, width_range_px, seed)) {
    // (dx / (w/2))^2 + (dy / (1.25 w))^2 <= 1, scaled to integers.
    const long long w = blob.width;
    const int rx = (blob.width + 1) / 2;
    const int ry = (5 * blob.width + 3) / 4;
    for (int dy = -ry; dy <= ry; ++dy)
      for (int dx = -rx; dx <= rx; ++dx) {
        if (100LL * dx * dx + 16LL * dy * dy <= 25 * w * w && out.contains(blob.cx + dx, blob.cy + dy)) {
          out.set(blob.cx + dx, blob.cy + dy, SegClass::kBackground);
        }
      }
  }
  return out;
}

SegMap CorruptSpeckle(const SegMap& seg, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("speckle rate must be in [0,1]");
  SegMap out = seg;
  if (rate == 0.0) return out;
  Rng rng(seed);
  for (auto& v : out.mutable_data()) {
    if (rng.Bernoulli(rate)) v = static_cast<std::uint8_t>(rng.Below(kNumClasses));
  }
  return out;
}

SegMap CorruptEdges(const SegMap& seg, double max_shift_px, std::uint64_t seed, bool delete_spots) {
  if (!(max_shift_px >= 0.0)) throw std::invalid_argument("max_shift_px must be >= 0");
  SegMap out = seg;
  Rng rng(seed);
  const int w = seg.width();
  const int h = seg.height();

  if (max_shift_px > 0.0) {
    // Random vectors on a coarse lattice, bilinearly interpolated; every
    // interpolant is a convex combination, so |d| <= max_shift_px.
    const int gw = w / kFieldSpacingPx + 2;
    const int gh = h / kFieldSpacingPx + 2;
    std::vector<Point2> grid(static_cast<std::size_t>(gw) * gh);
    for (auto& g : grid) {
      const double r = max_shift_px * std::sqrt(rng.Uniform01());
      const double t = 2.0 * std::numbers::pi * rng.Uniform01();
      g = {r * std::cos(t), r * std::sin(t)};
    }
    for (int y = 0; y < h; ++y) {
      const double gy = static_cast<double>(y) / kFieldSpacingPx;
      const int j = static_cast<int>(gy);
      const double fy = gy - j;
      for (int x = 0; x < w; ++x) {
        const double gx = static_cast<double>(x) / kFieldSpacingPx;
        const int i = static_cast<int>(gx);
        const double fx = gx - i;
        const Point2& g00 = grid[j * gw + i];
        const Point2& g10 = grid[j * gw + i + 1];
        const Point2& g01 = grid[(j + 1) * gw + i];
        const Point2& g11 = grid[(j + 1) * gw + i + 1];
        const double dx = (1 - fy) * ((1 - fx) * g00.x + fx * g10.x) + fy * ((1 - fx) * g01.x + fx * g11.x);
        const double dy = (1 - fy) * ((1 - fx) * g00.y + fx * g10.y) + fy * ((1 - fx) * g01.y + fx * g11.y);
        const int sx = std::clamp(static_cast<int>(std::lround(x + dx)), 0, w - 1);
        const int sy = std::clamp(static_cast<int>(std::lround(y + dy)), 0, h - 1);
        out.set(x, y, seg.at(sx, sy));
      }
    }
  }

  if (delete_spots) {
    const SegMap shifted = out;
    for (std::uint8_t cls : kSpotClasses) {
      for (const auto& comp : detail::ClassComponents(shifted, cls)) {
        if (!rng.Bernoulli(kSpotDeleteProb) || comp.size() > kMaxDeletableSpotPixels) continue;
        std::array<std::size_t, kNumClasses> votes{};
        for (int idx : comp) {
          const int x = idx % w;
          const int y = idx / w;
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if (!shifted.contains(x + dx, y + dy)) continue;
              const std::uint8_t c = shifted.at(x + dx, y + dy);
              if (c != kSpotClasses[0] && c != kSpotClasses[1]) ++votes[c];
            }
        }
        const auto fill = static_cast<std::uint8_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        for (int idx : comp) out.mutable_data()[idx] = fill;
      }
    }
  }
  return out;
}

CorruptionProfile NamedProfile(const std::string& name) {
  CorruptionProfile p;
  p.name = name;
  if (name == "clean") return p;
  if (name == "mild") {
    p.n_blobs = 5;
    p.speckle_rate = 0.005;
    p.edge_shift_px = 2.0;
    return p;
  }
  if (name == "heavy") {
    p.n_blobs = 15;
    p.speckle_rate = 0.02;
    p.edge_shift_px = 4.0;
    p.delete_spots = true;
    return p;
  }
  throw std::invalid_argument("unknown corruption profile '" + name + "' (expected clean, mild or heavy)");
}

SegMap ApplyProfile(const SegMap& seg, const CorruptionProfile& profile, std::uint64_t seed,
                    std::vector<CorruptionRecord>* log) {
  SegMap out = seg;
  auto record = [&](CorruptionRecord r) {
    if (log) log->push_back(std::move(r));
  };
  if (profile.edge_shift_px > 0.0 || profile.delete_spots) {
    const std::uint64_t s = ChildSeed(seed, 1);
    out = CorruptEdges(out, profile.edge_shift_px, s, profile.delete_spots);
    record({"edges", {{"max_shift_px", profile.edge_shift_px}, {"delete_spots", profile.delete_spots ? 1.0 : 0.0}}, s});
  }
  if (profile.n_blobs > 0) {
    const std::uint64_t s = ChildSeed(seed, 2);
    out = CorruptOcclusion(out, profile.n_blobs, profile.blob_width_px, s);
    record({"occlusion",
            {{"n_blobs", static_cast<double>(profile.n_blobs)},
             {"width_min_px", profile.blob_width_px.lo},
             {"width_max_px", profile.blob_width_px.hi}},
            s});
  }
  if (profile.speckle_rate > 0.0) {
    const std::uint64_t s = ChildSeed(seed, 3);
    out = CorruptSpeckle(out, profile.speckle_rate, s);
    record({"speckle", {{"rate", profile.speckle_rate}}, s});
  }
  return out;
}

std::size_t DatasetSize(const DatasetConfig& cfg) {
  return cfg.specs.size() * static_cast<std::size_t>(std::max(cfg.n_per_spec, 0));
}

SyntheticSample GenerateSample(const DatasetConfig& cfg, std::size_t index, const SegMap& tmpl) {
  if (cfg.specs.empty()) throw std::invalid_argument("dataset needs at least one rink spec");
  Validate(cfg.h_cfg);
  const SpecEntry& entry = cfg.specs.at(index / static_cast<std::size_t>(cfg.n_per_spec));
  const std::uint64_t seed = ChildSeed(cfg.seed, index);

  char id[32];
  std::snprintf(id, sizeof(id), "s%06zu", index);
  SyntheticSample sample{id, entry.id, entry.file, Homography::Identity(), SegMap(1, 1), {}, seed, 0};

  constexpr int kMaxResamples = 64;
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    const std::uint64_t draw_seed = attempt == 0 ? seed : ChildSeed(seed, 1000 + attempt);
    Rng rng(draw_seed);
    const Homography& base = cfg.h_cfg.base_pool[rng.Below(cfg.h_cfg.base_pool.size())];
    sample.gt_h = AugmentHomography(base, cfg.h_cfg, ChildSeed(draw_seed, 1));
    SegMap frame = WarpRaster(tmpl, sample.gt_h, cfg.h_cfg.frame_size.width, cfg.h_cfg.frame_size.height);
    if (frame.CountNonBackground() == 0) {
      ++sample.resample_count;
      continue;
    }
    if (sample.resample_count > 0) {
      sample.corruption_log.push_back(
          {"resample", {{"rejected_all_background", static_cast<double>(sample.resample_count)}}, draw_seed});
    }
    sample.frame_seg = ApplyProfile(frame, cfg.profile, ChildSeed(draw_seed, 2), &sample.corruption_log);
    return sample;
  }
  throw DegenerateError("sample " + sample.id + ": every draw warped the rink out of frame");
}

SyntheticSample GenerateSample(const DatasetConfig& cfg, std::size_t index) {
  if (cfg.n_per_spec <= 0 || index >= DatasetSize(cfg)) throw std::out_of_range("sample index out of range");
  const RinkSpec& spec = cfg.specs.at(index / static_cast<std::size_t>(cfg.n_per_spec)).spec;
  return GenerateSample(cfg, index, Rasterize(spec, cfg.template_size.width, cfg.template_size.height));
}

std::vector<SyntheticSample> MakeDataset(const DatasetConfig& cfg, int jobs) {
  const std::size_t n = DatasetSize(cfg);
  std::vector<SegMap> templates;
  templates.reserve(cfg.specs.size());
  for (const auto& e : cfg.specs) templates.push_back(Rasterize(e.spec, cfg.template_size.width, cfg.template_size.height));
  std::vector<std::optional<SyntheticSample>> slots(n);
  detail::ParallelFor(n, jobs, [&](std::size_t i) {
    slots[i] = GenerateSample(cfg, i, templates[i / static_cast<std::size_t>(cfg.n_per_spec)]);
  });
  std::vector<SyntheticSample> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::array<double, 8> CalibrateNormalizationScales(const HAugmentConfig& cfg, int draws) {
  Validate(cfg);
  if (cfg.base_pool.empty()) throw std::invalid_argument("calibration needs a non-empty base pool");
  if (draws < 2) throw std::invalid_argument("calibration needs at least 2 draws");
  std::vector<std::array<double, 9>> hs;
  hs.reserve(draws);
  for (int i = 0; i < draws; ++i) {
    Rng pick(ChildSeed(99, i));
    const Homography& base = cfg.base_pool[pick.Below(cfg.base_pool.size())];
    hs.push_back(AugmentHomography(base, cfg, ChildSeed(7, i)).entries());
  }
  std::array<double, 8> out{};
  for (int k = 0; k < 8; ++k) {
    double mean = 0.0;
    for (const auto& m : hs) mean += m[k];
    mean /= draws;
    double var = 0.0;
    for (const auto& m : hs) var += (m[k] - mean) * (m[k] - mean);
    out[k] = std::sqrt(var / draws);
  }
  return out;
}

}  // namespace rinkreg
