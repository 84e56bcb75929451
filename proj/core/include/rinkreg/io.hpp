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

#ifndef RINKREG_IO_HPP_
#define RINKREG_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rinkreg/homography.hpp"
#include "rinkreg/rink_model.hpp"
#include "rinkreg/seg_map.hpp"
#include "rinkreg/synthdata.hpp"

namespace rinkreg {

// Writes `bytes` to a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);

// 8-bit single-channel PNG, pixel value = class index. The sidecar JSON
// (same stem, .json) carries width, height and pixel_scale.
void WriteSegMap(const std::filesystem::path& png_path, const SegMap& seg);
SegMap ReadSegMap(const std::filesystem::path& png_path);

std::string EncodeSegPng(const SegMap& seg);
SegMap DecodeSegPng(std::string_view bytes);

// Interleaved 8-bit RGB.
void WriteRgbPng(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> rgb);

std::string RinkSpecToJson(const RinkSpec& spec);
RinkSpec RinkSpecFromJson(std::string_view json);  // ParseError on malformed input
void WriteRinkSpec(const std::filesystem::path& path, const RinkSpec& spec);
RinkSpec ReadRinkSpec(const std::filesystem::path& path);

// Nine reals, row-major, shortest round-trip formatting.
std::string HomographyToText(const Homography& h);
Homography HomographyFromText(std::string_view line);
std::string HomographyToJsonArray(const Homography& h);

// One dataset manifest line.
struct ManifestEntry {
  std::string id;
  std::string spec_file;
  Homography h_gt;
  std::string seg_png;
  std::vector<CorruptionRecord> corruption_log;
  std::uint64_t seed = 0;
};

std::string ManifestEntryToJson(const ManifestEntry& e);
ManifestEntry ManifestEntryFromJson(std::string_view line);
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);

// Path in a manifest, resolved against the manifest's directory when relative.
std::filesystem::path ResolveManifestPath(const std::filesystem::path& manifest, const std::string& rel);

// Writes specs/, frames/ and manifest.jsonl under out_dir; samples are
// generated and written by `jobs` workers. Returns the manifest entries.
std::vector<ManifestEntry> WriteDataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace rinkreg

#endif  // RINKREG_IO_HPP_
