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

#include "rinkreg/metrics.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "raster_util.hpp"
#include "rinkreg/errors.hpp"

namespace rinkreg {
namespace {

using nlohmann::json;

double Eval(const HalfPlane& hp, const Point2& p) { return hp.a * p.x + hp.b * p.y + hp.c; }

}  // namespace

ClassIou ComputeClassIou(const SegMap& a, const SegMap& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("class_iou: rasters are " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                         " and " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
  std::array<std::size_t, kNumClasses> inter{}, count_a{}, count_b{};
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    ++count_a[da[i]];
    ++count_b[db[i]];
    if (da[i] == db[i]) ++inter[da[i]];
  }
  ClassIou out;
  int present = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const std::size_t uni = count_a[c] + count_b[c] - inter[c];
    if (uni == 0) continue;
    out.present[c] = true;
    out.per_class[c] = static_cast<double>(inter[c]) / static_cast<double>(uni);
    out.mean += out.per_class[c];
    ++present;
  }
  if (present > 0) out.mean /= present;
  return out;
}

double PolygonArea(std::span<const Point2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) twice += Cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

std::vector<Point2> ClipPolygon(std::span<const Point2> poly, const HalfPlane& hp) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    const double fp = Eval(hp, p);
    const double fq = Eval(hp, q);
    if (fp >= 0.0) out.push_back(p);
    if ((fp >= 0.0) != (fq >= 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

std::array<HalfPlane, 4> FrameFootprint(const Homography& h, Size2 frame_size) {
  const auto& m = h.entries();
  const double w = frame_size.width;
  const double ht = frame_size.height;
  // Preimage of the frame centre through the adjugate; its depth sign marks
  // the side of the template horizon that the camera actually sees.
  const double cx = 0.5 * w, cy = 0.5 * ht;
  const double a0 = (m[4] * m[8] - m[5] * m[7]) * cx + (m[2] * m[7] - m[1] * m[8]) * cy + (m[1] * m[5] - m[2] * m[4]);
  const double a1 = (m[5] * m[6] - m[3] * m[8]) * cx + (m[0] * m[8] - m[2] * m[6]) * cy + (m[2] * m[3] - m[0] * m[5]);
  const double a2 = (m[3] * m[7] - m[4] * m[6]) * cx + (m[1] * m[6] - m[0] * m[7]) * cy + (m[0] * m[4] - m[1] * m[3]);
  double s = 1.0;
  if (std::abs(a2) > kHorizonTol) {
    const double q3 = m[6] * (a0 / a2) + m[7] * (a1 / a2) + m[8];
    s = q3 < 0.0 ? -1.0 : 1.0;
  }
  return {HalfPlane{s * m[0], s * m[1], s * m[2]},
          HalfPlane{s * (w * m[6] - m[0]), s * (w * m[7] - m[1]), s * (w * m[8] - m[2])},
          HalfPlane{s * m[3], s * m[4], s * m[5]},
          HalfPlane{s * (ht * m[6] - m[3]), s * (ht * m[7] - m[4]), s * (ht * m[8] - m[5])}};
}

std::string_view ClipModeName(ClipMode mode) { return mode == ClipMode::kRink ? "rink" : "template"; }

ClipMode ParseClipMode(std::string_view name) {
  if (name == "rink") return ClipMode::kRink;
  if (name == "template") return ClipMode::kTemplate;
  throw std::invalid_argument("unknown clip mode '" + std::string(name) + "' (expected rink or template)");
}

std::vector<Point2> ClipRegion(const RinkSpec& spec, ClipMode mode, Size2 template_size) {
  if (mode == ClipMode::kTemplate) {
    const Quad r = RectCorners(0, 0, template_size.width, template_size.height);
    return {r.begin(), r.end()};
  }
  return BoundaryPolygon(spec, FitTemplate(spec, template_size));
}

std::vector<Point2> VisiblePolygon(const Homography& h, Size2 frame_size, std::span<const Point2> region) {
  std::vector<Point2> poly(region.begin(), region.end());
  for (const HalfPlane& hp : FrameFootprint(h, frame_size)) poly = ClipPolygon(poly, hp);
  return poly;
}

double IouPart(const Homography& h_pred, const Homography& h_gt, Size2 frame_size, const RinkSpec& spec,
               ClipMode mode, Size2 template_size) {
  if (std::abs(h_pred.Determinant()) <= kAlgebraicTol || std::abs(h_gt.Determinant()) <= kAlgebraicTol) {
    throw DegenerateError("iou_part: singular homography");
  }
  if (h_pred == h_gt) {
    const std::vector<Point2> region = ClipRegion(spec, mode, template_size);
    return PolygonArea(VisiblePolygon(h_gt, frame_size, region)) != 0.0 ? 1.0 : 0.0;
  }
  // Fixed argument order keeps the result bit-identical under swapping.
  const bool swap = h_gt.entries() < h_pred.entries();
  const Homography& first = swap ? h_gt : h_pred;
  const Homography& second = swap ? h_pred : h_gt;
  const std::vector<Point2> region = ClipRegion(spec, mode, template_size);
  std::vector<Point2> both = VisiblePolygon(first, frame_size, region);
  const double area_first = std::abs(PolygonArea(both));
  const double area_second = std::abs(PolygonArea(VisiblePolygon(second, frame_size, region)));
  for (const HalfPlane& hp : FrameFootprint(second, frame_size)) both = ClipPolygon(both, hp);
  const double inter = std::abs(PolygonArea(both));
  const double uni = area_first + area_second - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Aggregate Summarize(std::span<const SampleScore> scores) {
  Aggregate agg;
  agg.count = scores.size();
  if (scores.empty()) return agg;
  std::vector<double> v;
  v.reserve(scores.size());
  double sum = 0.0;
  std::size_t ge90 = 0, ge95 = 0;
  for (const auto& s : scores) {
    v.push_back(s.iou_part);
    sum += s.iou_part;
    ge90 += s.iou_part >= 0.9;
    ge95 += s.iou_part >= 0.95;
    agg.failed += s.failed;
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  agg.mean = sum / static_cast<double>(n);
  agg.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  agg.frac_ge_090 = static_cast<double>(ge90) / static_cast<double>(n);
  agg.frac_ge_095 = static_cast<double>(ge95) / static_cast<double>(n);
  return agg;
}

EvalReport Evaluate(std::span<const EvalItem> items, const std::map<std::string, std::optional<Homography>>& predictions,
                    ClipMode mode, int jobs, Size2 template_size) {
  std::vector<std::string> missing;
  std::map<std::string, int> known;
  for (const auto& item : items) {
    known[item.id] = 1;
    if (!predictions.count(item.id)) missing.push_back(item.id);
  }
  if (!missing.empty()) throw MissingPrediction(missing);
  for (const auto& [id, h] : predictions) {
    if (!known.count(id)) throw ParseError("prediction for unknown sample id '" + id + "'");
  }

  EvalReport report;
  report.clip = mode;
  report.per_sample.resize(items.size());
  detail::ParallelFor(items.size(), jobs, [&](std::size_t i) {
    const EvalItem& item = items[i];
    SampleScore& score = report.per_sample[i];
    score.id = item.id;
    const auto& pred = predictions.at(item.id);
    if (!pred) {
      score.failed = true;
      return;
    }
    score.iou_part = IouPart(*pred, item.h_gt, item.frame_size, *item.spec, mode, template_size);
  });
  report.aggregate = Summarize(report.per_sample);
  return report;
}

std::string ReportToJson(const EvalReport& r) {
  json j;
  j["label"] = r.label;
  j["clip"] = ClipModeName(r.clip);
  j["config_hash"] = r.config_hash;
  j["aggregate"] = {{"count", r.aggregate.count},         {"failed", r.aggregate.failed},
                    {"mean", r.aggregate.mean},           {"median", r.aggregate.median},
                    {"frac_ge_0.90", r.aggregate.frac_ge_090}, {"frac_ge_0.95", r.aggregate.frac_ge_095}};
  j["per_sample"] = json::array();
  for (const auto& s : r.per_sample) {
    json e{{"id", s.id}, {"iou_part", s.iou_part}};
    if (s.failed) e["failed"] = true;
    j["per_sample"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

EvalReport ReportFromJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.label = j.at("label").get<std::string>();
    r.clip = ParseClipMode(j.at("clip").get<std::string>());
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& e : j.at("per_sample")) {
      r.per_sample.push_back({e.at("id").get<std::string>(), e.at("iou_part").get<double>(), e.value("failed", false)});
    }
    const json& a = j.at("aggregate");
    r.aggregate.count = a.at("count").get<std::size_t>();
    r.aggregate.failed = a.at("failed").get<std::size_t>();
    r.aggregate.mean = a.at("mean").get<double>();
    r.aggregate.median = a.at("median").get<double>();
    r.aggregate.frac_ge_090 = a.at("frac_ge_0.90").get<double>();
    r.aggregate.frac_ge_095 = a.at("frac_ge_0.95").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("eval report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("eval report: ") + e.what());
  }
}

std::string ReportToTable(std::span<const EvalReport> reports) {
  std::size_t label_w = 8;
  for (const auto& r : reports) label_w = std::max(label_w, r.label.size());
  std::string out;
  char line[512];
  std::snprintf(line, sizeof(line), "%-*s  %9s  %9s  %7s  %7s  %6s  %6s\n", static_cast<int>(label_w), "Pipeline",
                "IOU_part", "median", ">=0.90", ">=0.95", "n", "failed");
  out += line;
  out += std::string(label_w + 2 + 9 + 2 + 9 + 2 + 7 + 2 + 7 + 2 + 6 + 2 + 6, '-') + "\n";
  for (const auto& r : reports) {
    const Aggregate& a = r.aggregate;
    std::snprintf(line, sizeof(line), "%-*s  %8.2f%%  %8.2f%%  %6.1f%%  %6.1f%%  %6zu  %6zu\n",
                  static_cast<int>(label_w), r.label.c_str(), 100.0 * a.mean, 100.0 * a.median,
                  100.0 * a.frac_ge_090, 100.0 * a.frac_ge_095, a.count, a.failed);
    out += line;
  }
  return out;
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

}  // namespace rinkreg
