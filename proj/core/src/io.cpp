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

#include "rinkreg/io.hpp"

#include <png.h>

#include <charconv>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "raster_util.hpp"
#include "rinkreg/errors.hpp"

namespace rinkreg {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json Parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T Get(const json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

void RejectUnknownKeys(const json& j, std::initializer_list<const char*> allowed, std::string_view what) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ParseError(std::string(what) + ": unknown field '" + key + "'");
  }
}

json PointsToJson(const std::array<Point2, 4>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

std::array<Point2, 4> PointsFromJson(const json& j, const char* key) {
  const auto raw = Get<std::vector<std::array<double, 2>>>(j, key, "RinkSpec");
  if (raw.size() != 4) throw ParseError(std::string("RinkSpec: '") + key + "' needs 4 points");
  std::array<Point2, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = {raw[i][0], raw[i][1]};
  return out;
}

json HomographyJson(const Homography& h) { return json(h.entries()); }

Homography HomographyFromJsonValue(const json& j, std::string_view what) {
  std::array<double, 9> m;
  try {
    m = j.get<std::array<double, 9>>();
  } catch (const json::exception&) {
    throw ParseError(std::string(what) + ": homography must be 9 reals");
  }
  try {
    return Homography::FromMatrix(m);
  } catch (const DegenerateError& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

json RecordToJson(const CorruptionRecord& r) {
  return json{{"op", r.op}, {"params", r.params}, {"seed", r.seed}};
}

CorruptionRecord RecordFromJson(const json& j) {
  CorruptionRecord r;
  r.op = Get<std::string>(j, "op", "corruption record");
  r.params = Get<std::map<std::string, double>>(j, "params", "corruption record");
  r.seed = Get<std::uint64_t>(j, "seed", "corruption record");
  return r;
}

struct PngWriteState {
  std::string bytes;
};

std::string EncodePng(int width, int height, int channels, const std::uint8_t* pixels) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  PngWriteState state;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw IoError("PNG encoding failed");
  }
  png_set_write_fn(
      png, &state,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<PngWriteState*>(png_get_io_ptr(p))->bytes.append(reinterpret_cast<const char*>(data), len);
      },
      [](png_structp) {});
  png_set_IHDR(png, info, width, height, 8, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels + static_cast<std::size_t>(y) * width * channels));
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return std::move(state.bytes);
}

fs::path SidecarPath(const fs::path& png_path) {
  fs::path p = png_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string EncodeSegPng(const SegMap& seg) { return EncodePng(seg.width(), seg.height(), 1, seg.data().data()); }

SegMap DecodeSegPng(std::string_view bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ParseError(std::string("not a readable PNG: ") + image.message);
  }
  if (PNG_IMAGE_PIXEL_CHANNELS(image.format) != 1 || (image.format & PNG_FORMAT_FLAG_COLORMAP)) {
    png_image_free(&image);
    throw ParseError("segmentation PNG must be single-channel");
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw ParseError("PNG decode failed: " + msg);
  }
  return SegMap(static_cast<int>(image.width), static_cast<int>(image.height), std::move(data));
}

void WriteSegMap(const fs::path& png_path, const SegMap& seg) {
  WriteFileAtomic(png_path, EncodeSegPng(seg));
  json side{{"width", seg.width()}, {"height", seg.height()}, {"classes", kNumClasses}};
  side["pixel_scale"] = seg.pixel_scale ? json(*seg.pixel_scale) : json(nullptr);
  if (seg.origin) side["origin"] = {seg.origin->x, seg.origin->y};
  WriteFileAtomic(SidecarPath(png_path), side.dump(2) + "\n");
}

SegMap ReadSegMap(const fs::path& png_path) {
  SegMap seg = DecodeSegPng(ReadFile(png_path));
  const fs::path side_path = SidecarPath(png_path);
  if (fs::exists(side_path)) {
    const json side = Parse(ReadFile(side_path), side_path.string());
    if (Get<int>(side, "width", "sidecar") != seg.width() || Get<int>(side, "height", "sidecar") != seg.height()) {
      throw ParseError(side_path.string() + ": dimensions disagree with PNG");
    }
    if (side.contains("pixel_scale") && !side["pixel_scale"].is_null()) {
      seg.pixel_scale = side["pixel_scale"].get<double>();
    }
    if (side.contains("origin")) {
      const auto o = side["origin"].get<std::array<double, 2>>();
      seg.origin = Point2{o[0], o[1]};
    }
  }
  return seg;
}

void WriteRgbPng(const fs::path& path, int width, int height, std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw DimensionError("RGB buffer size mismatch");
  WriteFileAtomic(path, EncodePng(width, height, 3, rgb.data()));
}

std::string RinkSpecToJson(const RinkSpec& s) {
  json j;
  j["length"] = s.length;
  j["width"] = s.width;
  j["corner_radius"] = s.corner_radius;
  j["goal_line_offset"] = s.goal_line_offset;
  j["blue_line_offset"] = s.blue_line_offset;
  j["centre_circle_radius"] = s.centre_circle_radius;
  j["outer_faceoff_circle_radius"] = s.outer_faceoff_circle_radius;
  j["outer_faceoff_centres"] = PointsToJson(s.outer_faceoff_centres);
  j["inner_faceoff_spots"] = PointsToJson(s.inner_faceoff_spots);
  j["outer_faceoff_spot_radius"] = s.outer_faceoff_spot_radius;
  j["crease_shape"] = {{"kind", s.crease_shape == CreaseShape::kSemicircle ? "semicircle" : "truncated_semicircle"},
                       {"radius", s.crease_radius}};
  j["goal_width"] = s.goal_width;
  j["line_thickness_map"] = {{std::string(ClassName(SegClass::kBlueLines)), s.blue_line_thickness},
                             {std::string(ClassName(SegClass::kCenterLine)), s.centre_line_thickness}};
  return j.dump(2) + "\n";
}

RinkSpec RinkSpecFromJson(std::string_view text) {
  const json j = Parse(text, "RinkSpec");
  if (!j.is_object()) throw ParseError("RinkSpec: expected a JSON object");
  RejectUnknownKeys(j,
                    {"length", "width", "corner_radius", "goal_line_offset", "blue_line_offset",
                     "centre_circle_radius", "outer_faceoff_circle_radius", "outer_faceoff_centres",
                     "inner_faceoff_spots", "outer_faceoff_spot_radius", "crease_shape", "goal_width",
                     "line_thickness_map"},
                    "RinkSpec");
  RinkSpec s;
  s.length = Get<double>(j, "length", "RinkSpec");
  s.width = Get<double>(j, "width", "RinkSpec");
  s.corner_radius = Get<double>(j, "corner_radius", "RinkSpec");
  s.goal_line_offset = Get<double>(j, "goal_line_offset", "RinkSpec");
  s.blue_line_offset = Get<double>(j, "blue_line_offset", "RinkSpec");
  s.centre_circle_radius = Get<double>(j, "centre_circle_radius", "RinkSpec");
  s.outer_faceoff_circle_radius = Get<double>(j, "outer_faceoff_circle_radius", "RinkSpec");
  s.outer_faceoff_centres = PointsFromJson(j, "outer_faceoff_centres");
  s.inner_faceoff_spots = PointsFromJson(j, "inner_faceoff_spots");
  s.outer_faceoff_spot_radius = Get<double>(j, "outer_faceoff_spot_radius", "RinkSpec");
  const json crease = Get<json>(j, "crease_shape", "RinkSpec");
  const auto kind = Get<std::string>(crease, "kind", "RinkSpec.crease_shape");
  if (kind == "semicircle") {
    s.crease_shape = CreaseShape::kSemicircle;
  } else if (kind == "truncated_semicircle") {
    s.crease_shape = CreaseShape::kTruncatedSemicircle;
  } else {
    throw ParseError("RinkSpec: unknown crease kind '" + kind + "'");
  }
  s.crease_radius = Get<double>(crease, "radius", "RinkSpec.crease_shape");
  s.goal_width = Get<double>(j, "goal_width", "RinkSpec");
  const json lines = Get<json>(j, "line_thickness_map", "RinkSpec");
  s.blue_line_thickness = Get<double>(lines, "BlueLines", "RinkSpec.line_thickness_map");
  s.centre_line_thickness = Get<double>(lines, "CenterLine", "RinkSpec.line_thickness_map");
  if (const auto errs = CheckInvariants(s); !errs.empty()) throw ParseError("RinkSpec: " + errs.front());
  return s;
}

void WriteRinkSpec(const fs::path& path, const RinkSpec& spec) { WriteFileAtomic(path, RinkSpecToJson(spec)); }

RinkSpec ReadRinkSpec(const fs::path& path) {
  try {
    return RinkSpecFromJson(ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string HomographyToText(const Homography& h) {
  std::string out;
  char buf[64];
  for (int i = 0; i < 9; ++i) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), h.entries()[i]);
    if (i) out.push_back(' ');
    out.append(buf, res.ptr);
  }
  return out;
}

Homography HomographyFromText(std::string_view line) {
  std::array<double, 9> m;
  std::size_t pos = 0;
  for (int i = 0; i < 9; ++i) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    const auto res = std::from_chars(line.data() + pos, line.data() + line.size(), m[i]);
    if (res.ec != std::errc()) throw ParseError("homography text: expected 9 reals");
    pos = static_cast<std::size_t>(res.ptr - line.data());
  }
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  if (pos != line.size()) throw ParseError("homography text: trailing characters");
  try {
    return Homography::FromMatrix(m);
  } catch (const DegenerateError& e) {
    throw ParseError(std::string("homography text: ") + e.what());
  }
}

std::string HomographyToJsonArray(const Homography& h) { return HomographyJson(h).dump(); }

std::string ManifestEntryToJson(const ManifestEntry& e) {
  json j;
  j["id"] = e.id;
  j["spec_file"] = e.spec_file;
  j["h_gt"] = HomographyJson(e.h_gt);
  j["seg_png"] = e.seg_png;
  j["corruption_log"] = json::array();
  for (const auto& r : e.corruption_log) j["corruption_log"].push_back(RecordToJson(r));
  j["seed"] = e.seed;
  return j.dump();
}

ManifestEntry ManifestEntryFromJson(std::string_view line) {
  const json j = Parse(line, "manifest entry");
  ManifestEntry e;
  e.id = Get<std::string>(j, "id", "manifest entry");
  e.spec_file = Get<std::string>(j, "spec_file", "manifest entry");
  e.h_gt = HomographyFromJsonValue(Get<json>(j, "h_gt", "manifest entry"), "manifest entry h_gt");
  e.seg_png = Get<std::string>(j, "seg_png", "manifest entry");
  for (const auto& r : Get<json>(j, "corruption_log", "manifest entry")) e.corruption_log.push_back(RecordFromJson(r));
  e.seed = Get<std::uint64_t>(j, "seed", "manifest entry");
  return e;
}

std::vector<ManifestEntry> ReadManifest(const fs::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<ManifestEntry> out;
  std::string line;
  int lineno = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ManifestEntryFromJson(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!ids.insert(out.back().id).second) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": duplicate id " + out.back().id);
    }
  }
  return out;
}

fs::path ResolveManifestPath(const fs::path& manifest, const std::string& rel) {
  const fs::path p(rel);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

std::vector<ManifestEntry> WriteDataset(const DatasetConfig& cfg, const fs::path& out_dir, int jobs) {
  std::error_code ec;
  fs::create_directories(out_dir / "frames", ec);
  fs::create_directories(out_dir / "specs", ec);
  if (ec) throw IoError("cannot create dataset directories under " + out_dir.string());

  DatasetConfig local = cfg;
  std::vector<SegMap> templates;
  for (auto& e : local.specs) {
    e.file = "specs/" + e.id + ".json";
    WriteRinkSpec(out_dir / e.file, e.spec);
    templates.push_back(Rasterize(e.spec, cfg.template_size.width, cfg.template_size.height));
  }

  const std::size_t n = DatasetSize(local);
  std::vector<ManifestEntry> entries(n);
  detail::ParallelFor(n, jobs, [&](std::size_t i) {
    SyntheticSample s = GenerateSample(local, i, templates[i / static_cast<std::size_t>(local.n_per_spec)]);
    const std::string png = "frames/" + s.id + ".png";
    WriteSegMap(out_dir / png, s.frame_seg);
    entries[i] = ManifestEntry{s.id, s.spec_file, s.gt_h, png, std::move(s.corruption_log), s.seed};
  });

  std::string manifest;
  for (const auto& e : entries) manifest += ManifestEntryToJson(e) + "\n";
  WriteFileAtomic(out_dir / "manifest.jsonl", manifest);
  return entries;
}

}  // namespace rinkreg
