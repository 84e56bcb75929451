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

#include <gtest/gtest.h>

#include <filesystem>

#include "json.hpp"
#include "rinkreg/camera_model.hpp"
#include "rinkreg/errors.hpp"
#include "rinkreg/random.hpp"
#include "test_util.hpp"

namespace rinkreg {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rinkreg_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IoTest, SegPngRoundTrip) {
  SegMap seg = Rasterize(PresetSpec(RinkPreset::kIIHF));
  seg.pixel_scale = 0.15;
  seg.origin = Point2{200, 85};
  WriteSegMap(dir_ / "t.png", seg);
  EXPECT_TRUE(fs::exists(dir_ / "t.json"));
  EXPECT_FALSE(fs::exists(dir_ / "t.png.tmp"));
  const SegMap back = ReadSegMap(dir_ / "t.png");
  EXPECT_EQ(back, seg);
  ASSERT_TRUE(back.pixel_scale.has_value());
  EXPECT_DOUBLE_EQ(*back.pixel_scale, 0.15);
  ASSERT_TRUE(back.origin.has_value());
  EXPECT_EQ(*back.origin, (Point2{200, 85}));
}

TEST_F(IoTest, PngEncodingIsDeterministic) {
  const SegMap seg = Rasterize(PresetSpec(RinkPreset::kNHL));
  EXPECT_EQ(EncodeSegPng(seg), EncodeSegPng(seg));
  EXPECT_EQ(DecodeSegPng(EncodeSegPng(seg)), seg);
}

TEST_F(IoTest, RejectsNonSegmentationPngs) {
  std::vector<std::uint8_t> rgb(4 * 3 * 3, 1);
  WriteRgbPng(dir_ / "rgb.png", 4, 3, rgb);
  EXPECT_THROW(ReadSegMap(dir_ / "rgb.png"), ParseError);
  EXPECT_THROW(DecodeSegPng("not a png"), ParseError);
  EXPECT_THROW(ReadSegMap(dir_ / "missing.png"), IoError);
}

TEST(SegPngTest, OutOfRangeClassIndexIsRejected) {
  // Valid greyscale PNG whose only pixel value is not a class index.
  SegMap seg(3, 3);
  std::string png = EncodeSegPng(seg);
  EXPECT_NO_THROW(DecodeSegPng(png));
  SegMap patched(3, 3);
  patched.mutable_data()[4] = 11;
  EXPECT_THROW(DecodeSegPng(EncodeSegPng(patched)), ParseError);
}

TEST(RinkSpecJsonTest, RoundTripAndFieldNames) {
  for (const RinkSpec& spec : {PresetSpec(RinkPreset::kNHL), PresetSpec(RinkPreset::kIIHF), RandomSpec(9)}) {
    const std::string text = RinkSpecToJson(spec);
    EXPECT_EQ(RinkSpecFromJson(text), spec);
    const auto j = nlohmann::json::parse(text);
    for (const char* key : {"length", "width", "corner_radius", "goal_line_offset", "blue_line_offset",
                            "centre_circle_radius", "outer_faceoff_circle_radius", "outer_faceoff_centres",
                            "inner_faceoff_spots", "outer_faceoff_spot_radius", "crease_shape", "goal_width",
                            "line_thickness_map"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_TRUE(j["line_thickness_map"].contains("BlueLines"));
    EXPECT_TRUE(j["line_thickness_map"].contains("CenterLine"));
    EXPECT_EQ(j["outer_faceoff_centres"].size(), 4u);
  }
}

TEST(RinkSpecJsonTest, RejectsMalformedInput) {
  auto j = nlohmann::json::parse(RinkSpecToJson(PresetSpec(RinkPreset::kNHL)));
  EXPECT_THROW(RinkSpecFromJson("{"), ParseError);
  auto missing = j;
  missing.erase("width");
  EXPECT_THROW(RinkSpecFromJson(missing.dump()), ParseError);
  auto extra = j;
  extra["colour"] = "red";
  EXPECT_THROW(RinkSpecFromJson(extra.dump()), ParseError);
  auto invalid = j;
  invalid["corner_radius"] = 100.0;
  EXPECT_THROW(RinkSpecFromJson(invalid.dump()), ParseError);
  auto kind = j;
  kind["crease_shape"]["kind"] = "square";
  EXPECT_THROW(RinkSpecFromJson(kind.dump()), ParseError);
}

TEST(HomographyTextTest, RoundTripIsBitExact) {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const Homography h = testing::RandomHomography(rng);
    EXPECT_EQ(HomographyFromText(HomographyToText(h)), h);
    const auto arr = nlohmann::json::parse(HomographyToJsonArray(h)).get<std::array<double, 9>>();
    EXPECT_EQ(arr, h.entries());
  }
  EXPECT_THROW(HomographyFromText("1 0 0 0 1 0 0 0"), ParseError);
  EXPECT_THROW(HomographyFromText("1 0 0 0 1 0 0 0 1 7"), ParseError);
  EXPECT_THROW(HomographyFromText("1 2 3 2 4 6 0 0 1"), ParseError);
}

TEST(ManifestTest, EntryRoundTrip) {
  ManifestEntry e{"s000001", "specs/nhl.json", GenerateCameraPool(1)[0], "frames/s000001.png",
                  {{"speckle", {{"rate", 0.02}}, 0xfedcba9876543210ULL}}, 0x0123456789abcdefULL};
  const ManifestEntry back = ManifestEntryFromJson(ManifestEntryToJson(e));
  EXPECT_EQ(back.id, e.id);
  EXPECT_EQ(back.spec_file, e.spec_file);
  EXPECT_EQ(back.h_gt, e.h_gt);
  EXPECT_EQ(back.seg_png, e.seg_png);
  EXPECT_EQ(back.seed, e.seed);
  ASSERT_EQ(back.corruption_log.size(), 1u);
  EXPECT_EQ(back.corruption_log[0].op, "speckle");
  EXPECT_EQ(back.corruption_log[0].seed, 0xfedcba9876543210ULL);
  EXPECT_DOUBLE_EQ(back.corruption_log[0].params.at("rate"), 0.02);
  EXPECT_THROW(ManifestEntryFromJson(R"({"id":"x"})"), ParseError);
}

TEST_F(IoTest, WriteDatasetProducesReadableManifest) {
  DatasetConfig cfg;
  cfg.specs = {{"nhl", "", PresetSpec(RinkPreset::kNHL)}, {"iihf", "", PresetSpec(RinkPreset::kIIHF)}};
  cfg.n_per_spec = 2;
  cfg.h_cfg.frame_size = {320, 180};
  for (const auto& h : GenerateCameraPool(20)) cfg.h_cfg.base_pool.push_back(Compose(Homography::Scaling(0.25, 0.25), h));
  cfg.profile = NamedProfile("mild");
  cfg.seed = 8;
  const auto written = WriteDataset(cfg, dir_ / "ds", 2);
  const auto entries = ReadManifest(dir_ / "ds" / "manifest.jsonl");
  ASSERT_EQ(entries.size(), 4u);
  ASSERT_EQ(written.size(), 4u);
  const auto samples = MakeDataset(cfg);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    EXPECT_EQ(e.h_gt, samples[i].gt_h);
    EXPECT_EQ(e.seed, samples[i].seed);
    const fs::path png = ResolveManifestPath(dir_ / "ds" / "manifest.jsonl", e.seg_png);
    EXPECT_EQ(ReadSegMap(png), samples[i].frame_seg);
    const RinkSpec spec = ReadRinkSpec(ResolveManifestPath(dir_ / "ds" / "manifest.jsonl", e.spec_file));
    EXPECT_EQ(spec, cfg.specs[i / 2].spec);
  }
  // A second write is byte-identical.
  WriteDataset(cfg, dir_ / "ds2", 1);
  EXPECT_EQ(ReadFile(dir_ / "ds" / "manifest.jsonl"), ReadFile(dir_ / "ds2" / "manifest.jsonl"));
  EXPECT_EQ(ReadFile(dir_ / "ds" / "frames" / "s000003.png"), ReadFile(dir_ / "ds2" / "frames" / "s000003.png"));
}

TEST_F(IoTest, ManifestRejectsDuplicateIds) {
  ManifestEntry e{"a", "s.json", Homography::Identity(), "a.png", {}, 1};
  const std::string line = ManifestEntryToJson(e) + "\n";
  WriteFileAtomic(dir_ / "m.jsonl", line + line);
  EXPECT_THROW(ReadManifest(dir_ / "m.jsonl"), ParseError);
}

}  // namespace
}  // namespace rinkreg
