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

#include <benchmark/benchmark.h>

#include <vector>

#include "rinkreg/camera_model.hpp"
#include "rinkreg/homography.hpp"
#include "rinkreg/metrics.hpp"
#include "rinkreg/random.hpp"
#include "rinkreg/registration.hpp"
#include "rinkreg/rink_model.hpp"
#include "rinkreg/synthdata.hpp"

namespace rinkreg {
namespace {

const DatasetConfig& Config() {
  static const DatasetConfig cfg = [] {
    DatasetConfig c;
    c.specs = {{"nhl", "", PresetSpec(RinkPreset::kNHL)}};
    c.n_per_spec = 8;
    c.h_cfg.base_pool = GenerateCameraPool();
    c.seed = 1;
    return c;
  }();
  return cfg;
}

const SyntheticSample& Sample() {
  static const SyntheticSample s = GenerateSample(Config(), 0);
  return s;
}

void BM_DltSolve(benchmark::State& state) {
  Rng rng(1);
  const Homography h = Sample().gt_h;
  std::vector<Correspondence> pairs;
  for (int i = 0; i < state.range(0); ++i) {
    const Point2 p{rng.Uniform(0, 400), rng.Uniform(0, 170)};
    pairs.push_back({p, Apply(h, p)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(DltSolve(pairs));
}
BENCHMARK(BM_DltSolve)->Arg(4)->Arg(12)->Arg(100);

void BM_Rasterize(benchmark::State& state) {
  const RinkSpec spec = PresetSpec(RinkPreset::kNHL);
  for (auto _ : state) benchmark::DoNotOptimize(Rasterize(spec));
}
BENCHMARK(BM_Rasterize)->Unit(benchmark::kMillisecond);

void BM_WarpRaster(benchmark::State& state) {
  const SegMap tmpl = Rasterize(PresetSpec(RinkPreset::kNHL));
  const auto sampling = static_cast<Sampling>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(WarpRaster(tmpl, Sample().gt_h, 1280, 720, sampling));
}
BENCHMARK(BM_WarpRaster)
    ->Arg(static_cast<int>(Sampling::kNearest))
    ->Arg(static_cast<int>(Sampling::kBilinearOneHot))
    ->Unit(benchmark::kMillisecond);

void BM_ExtractFrameKeypoints(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ExtractFrameKeypoints(Sample().frame_seg));
}
BENCHMARK(BM_ExtractFrameKeypoints)->Unit(benchmark::kMillisecond);

void BM_MaskObjectiveL1(benchmark::State& state) {
  const SegMap tmpl = Rasterize(PresetSpec(RinkPreset::kNHL));
  const MaskObjective obj(Sample().frame_seg, tmpl, static_cast<int>(state.range(0)));
  const Homography h = Compose(Homography::Translation(3, -2), Sample().gt_h);
  for (auto _ : state) benchmark::DoNotOptimize(obj.L1(h));
}
BENCHMARK(BM_MaskObjectiveL1)->Arg(4)->Arg(5)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_IouPart(benchmark::State& state) {
  const RinkSpec spec = PresetSpec(RinkPreset::kNHL);
  const Homography pred = Compose(Homography::Translation(5, 3), Sample().gt_h);
  for (auto _ : state) benchmark::DoNotOptimize(IouPart(pred, Sample().gt_h, {1280, 720}, spec));
}
BENCHMARK(BM_IouPart);

void BM_GenerateSample(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(GenerateSample(Config(), i++ % DatasetSize(Config())));
}
BENCHMARK(BM_GenerateSample)->Unit(benchmark::kMillisecond);

void BM_EstimateInitial(benchmark::State& state) {
  const RinkSpec& spec = Config().specs[0].spec;
  for (auto _ : state) benchmark::DoNotOptimize(EstimateInitial(Sample().frame_seg, spec));
}
BENCHMARK(BM_EstimateInitial)->Unit(benchmark::kMillisecond);

void BM_Register(benchmark::State& state) {
  const RinkSpec& spec = Config().specs[0].spec;
  const int iters = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Register(Sample().frame_seg, spec, {}, {}, iters));
}
BENCHMARK(BM_Register)->Arg(0)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rinkreg

BENCHMARK_MAIN();
