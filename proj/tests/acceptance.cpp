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

// Acceptance suite: one PASS/FAIL line per criterion. Extra arguments are
// unit-test binaries run for the property-suite criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rinkreg/camera_model.hpp"
#include "rinkreg/errors.hpp"
#include "rinkreg/homography.hpp"
#include "rinkreg/metrics.hpp"
#include "rinkreg/random.hpp"
#include "rinkreg/registration.hpp"
#include "rinkreg/rink_model.hpp"
#include "rinkreg/synthdata.hpp"
#include "test_util.hpp"

namespace rinkreg {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kPerSpec = 50;   // 4 specs -> 200 clean samples
constexpr int kCorruptPerSpec = 15;
constexpr std::uint64_t kSeed = 2026;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void Report(const std::string& name, const Outcome& o) {
  std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool Finite(const Homography& h) {
  return std::all_of(h.entries().begin(), h.entries().end(), [](double x) { return std::isfinite(x); });
}

bool AllFinite(const RegistrationResult& r) {
  if (!Finite(r.h_init) || !Finite(r.h_final)) return false;
  return std::all_of(r.iterations.begin(), r.iterations.end(),
                     [](const IterationRecord& it) { return Finite(it.h) && std::isfinite(it.objective); });
}

DatasetConfig Dataset(const std::string& profile, int per_spec) {
  DatasetConfig cfg;
  cfg.specs = {{"nhl", "", PresetSpec(RinkPreset::kNHL)},
               {"iihf", "", PresetSpec(RinkPreset::kIIHF)},
               {"rand_a", "", RandomSpec(ChildSeed(kSeed, 1))},
               {"rand_b", "", RandomSpec(ChildSeed(kSeed, 2))}};
  cfg.n_per_spec = per_spec;
  cfg.h_cfg.base_pool = GenerateCameraPool();
  cfg.profile = NamedProfile(profile);
  cfg.seed = kSeed;
  return cfg;
}

// IOU_part after 0..3 refinement rounds, per sample; failures score 0.
struct RunStats {
  std::vector<std::array<double, 4>> iou;
  std::vector<std::string> spec_id;
  std::size_t failed = 0;
  double register_seconds = 0.0;
};

RunStats RegisterAll(const DatasetConfig& cfg, int per_spec_used,
                     const std::function<void(const SyntheticSample&, const RinkSpec&, const RegistrationResult&)>&
                         inspect = nullptr) {
  RunStats stats;
  for (std::size_t s = 0; s < cfg.specs.size(); ++s) {
    const RinkSpec& spec = cfg.specs[s].spec;
    for (int k = 0; k < per_spec_used; ++k) {
      const SyntheticSample sample = GenerateSample(cfg, s * cfg.n_per_spec + k);
      InitConfig init;
      init.seed = ChildSeed(kSeed, s * cfg.n_per_spec + k);
      const auto t0 = Clock::now();
      const RegistrationResult r = Register(sample.frame_seg, spec, init, {}, 3);
      stats.register_seconds += Seconds(t0);
      std::array<double, 4> v{};
      if (r.status == RegStatus::kInitFailed) {
        ++stats.failed;
      } else {
        for (int i = 0; i < 4; ++i) {
          v[i] = IouPart(r.AfterIterations(i), sample.gt_h, kDefaultFrameSize, spec);
        }
      }
      stats.iou.push_back(v);
      stats.spec_id.push_back(cfg.specs[s].id);
      if (inspect) inspect(sample, spec, r);
    }
  }
  return stats;
}

double MedianAt(const RunStats& st, int iters, const std::string& spec_id = {}) {
  std::vector<double> v;
  for (std::size_t i = 0; i < st.iou.size(); ++i) {
    if (spec_id.empty() || st.spec_id[i] == spec_id) v.push_back(st.iou[i][iters]);
  }
  return Median(v);
}

// ---------------------------------------------------------------------------

Outcome DltOracle() {
  Rng rng(11);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const Homography h = testing::RandomHomography(rng);
    for (int n : {4, 12}) {
      std::vector<Correspondence> pairs;
      for (int k = 0; k < n; ++k) {
        const Point2 p = testing::RandomPoint(rng);
        pairs.push_back({p, testing::MultiplyDehomogenize(h.entries(), p)});
      }
      worst = std::max(worst, MaxAbsDifference(DltSolve(pairs), h));
    }
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-6 && secs < 5.0, Fmt("max |dH| %.3g (<= 1e-6), %.2f s (< 5 s)", worst, secs)};
}

Outcome MetricOracle() {
  Rng rng(6);
  const auto pool = GenerateCameraPool();
  const std::vector<RinkSpec> specs = {PresetSpec(RinkPreset::kNHL), PresetSpec(RinkPreset::kIIHF),
                                       RandomSpec(ChildSeed(kSeed, 3))};
  const Quad rect = RectCorners(0, 0, kDefaultFrameSize.width, kDefaultFrameSize.height);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const RinkSpec& spec = specs[i % specs.size()];
    const Homography gt = pool[rng.Below(pool.size())];
    Quad moved = rect;
    const double px = rng.Uniform(2.0, 60.0);
    for (auto& p : moved) {
      const double t = rng.Uniform(0.0, 6.283185307179586);
      p += px * Point2{std::cos(t), std::sin(t)};
    }
    const Homography pred = Compose(FromFourPoints(rect, moved), gt);
    const bool rink = i % 5 != 4;
    const double exact = IouPart(pred, gt, kDefaultFrameSize, spec, rink ? ClipMode::kRink : ClipMode::kTemplate);
    const double mc = testing::MonteCarloIouPart(pred, gt, kDefaultFrameSize, spec, rink, 1'000'000, 500 + i);
    worst = std::max(worst, std::abs(exact - mc));
  }
  return {worst <= 0.003, Fmt("max |polygon - Monte-Carlo| %.5f over 50 pairs (<= 0.003)", worst)};
}

Outcome PropertySuites(const std::vector<std::string>& binaries) {
  if (binaries.empty()) return {false, "no unit-test binaries given"};
  std::string failed;
  for (const auto& b : binaries) {
    const std::string cmd = "\"" + b + "\" --gtest_brief=1 > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) failed += " " + fs::path(b).filename().string();
  }
  return {failed.empty(),
          failed.empty() ? Fmt("%zu suites passed", binaries.size()) : "failing suites:" + failed};
}

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rinkreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::Run(static_cast<int>(argv.size()), argv.data());
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome EndToEndDeterminism() {
  const fs::path root = fs::temp_directory_path() / "rinkreg_acceptance_e2e";
  fs::remove_all(root);
  for (const std::string run : {"a", "b"}) {
    const fs::path d = root / run;
    if (Cli({"rinkgen", "--n", "2", "--seed", "8", "--out", (d / "specs").string()}) != 0 ||
        Cli({"synth", "--specs", (d / "specs").string(), "--preset", "nhl", "iihf", "--profile", "mild",
             "--n-per-spec", "2", "--seed", "8", "--jobs", "1", "--out", (d / "ds").string()}) != 0 ||
        Cli({"register", "--manifest", (d / "ds" / "manifest.jsonl").string(), "--iters", "3", "--seed", "8",
             "--jobs", "1", "--out", (d / "reg").string()}) != 0 ||
        Cli({"eval", "--manifest", (d / "ds" / "manifest.jsonl").string(), "--predictions",
             (d / "reg" / "predictions.jsonl").string(), "--out", (d / "ev").string()}) != 0) {
      fs::remove_all(root);
      return {false, "a CLI step exited non-zero"};
    }
  }
  std::string differ;
  for (const char* f : {"ds/manifest.jsonl", "reg/predictions.jsonl", "ev/report.json", "ev/report.txt"}) {
    const std::string a = Slurp(root / "a" / f), b = Slurp(root / "b" / f);
    if (a.empty() || a != b) differ += std::string(" ") + f;
  }
  fs::remove_all(root);
  return {differ.empty(), differ.empty() ? "predictions, reports and manifest byte-identical across two runs"
                                         : "differs:" + differ};
}

}  // namespace
}  // namespace rinkreg

int main(int argc, char** argv) {
  using namespace rinkreg;
  std::vector<std::string> suites(argv + 1, argv + argc);
  const auto t_all = Clock::now();

  Report("[1] DLT oracle", DltOracle());

  // Criteria 2-4 share one single-threaded pass over the clean set.
  const DatasetConfig clean_cfg = Dataset("clean", kPerSpec);
  const RunStats clean = RegisterAll(clean_cfg, kPerSpec);
  const double m3 = MedianAt(clean, 3);
  Report("[2] clean refinement accuracy",
         {m3 >= 0.97 && clean.register_seconds < 600.0,
          Fmt("median IOU_part %.4f (>= 0.97) over %zu samples, %zu InitFailed, %.1f s (< 600 s)", m3,
              clean.iou.size(), clean.failed, clean.register_seconds)});

  const double m[4] = {MedianAt(clean, 0), MedianAt(clean, 1), MedianAt(clean, 2), m3};
  Report("[3] iteration profile",
         {m[0] < m[1] && m[1] < m[2] + 0.002 && std::abs(m[3] - m[2]) <= 0.005,
          Fmt("medians %.4f / %.4f / %.4f / %.4f (m0 < m1 < m2 + 0.002, |m3 - m2| <= 0.005)", m[0], m[1], m[2],
              m[3])});

  const double nhl = MedianAt(clean, 3, "nhl"), iihf = MedianAt(clean, 3, "iihf");
  Report("[4] rink-agnostic parity",
         {std::abs(nhl - iihf) <= 0.02, Fmt("NHL %.4f vs IIHF %.4f, |diff| %.4f (<= 0.02)", nhl, iihf,
                                            std::abs(nhl - iihf))});

  // Mild: same seeds and sample indices as the first kCorruptPerSpec clean
  // samples of each spec.
  const RunStats mild = RegisterAll(Dataset("mild", kPerSpec), kCorruptPerSpec);
  std::vector<double> clean_subset;
  for (std::size_t s = 0; s < clean_cfg.specs.size(); ++s)
    for (int k = 0; k < kCorruptPerSpec; ++k) clean_subset.push_back(clean.iou[s * kPerSpec + k][3]);
  const double m_clean = Median(clean_subset), m_mild = MedianAt(mild, 3);
  Report("[5a] mild corruption",
         {m_clean - m_mild <= 0.03, Fmt("median %.4f vs clean %.4f on the same %zu samples (drop <= 0.03)", m_mild,
                                        m_clean, mild.iou.size())});

  // Heavy: every output finite, every accepted init above the overlap floor,
  // and frames without rink evidence fail cleanly.
  std::size_t nonfinite = 0, below_floor = 0, heavy_failed = 0;
  double worst_overlap = 1.0;
  const InitConfig defaults;
  auto inspect = [&](const SegMap& frame, const RinkSpec& spec, const RegistrationResult& r) {
    if (r.status == RegStatus::kInitFailed) {
      ++heavy_failed;
      return;
    }
    if (!AllFinite(r)) ++nonfinite;
    const SegMap tmpl = Rasterize(spec);
    const MaskObjective scorer(frame, tmpl, 4);
    const double overlap = scorer.SoftIou(r.h_init);
    worst_overlap = std::min(worst_overlap, overlap);
    if (!(overlap >= defaults.min_overlap)) ++below_floor;
  };
  const RunStats heavy = RegisterAll(Dataset("heavy", kPerSpec), kCorruptPerSpec,
                                     [&](const SyntheticSample& s, const RinkSpec& spec, const RegistrationResult& r) {
                                       inspect(s.frame_seg, spec, r);
                                     });
  std::size_t garbage_ok = 0, garbage_n = 0, exceptions = 0;
  {
    const RinkSpec spec = PresetSpec(RinkPreset::kNHL);
    Rng rng(kSeed);
    std::vector<SegMap> frames;
    frames.emplace_back(1280, 720);  // all Background
    for (int i = 0; i < 3; ++i) {
      std::vector<std::uint8_t> px(1280 * 720);
      for (auto& v : px) v = static_cast<std::uint8_t>(rng.Below(kNumClasses));
      frames.emplace_back(1280, 720, std::move(px));
    }
    for (const auto& f : frames) {
      ++garbage_n;
      try {
        const RegistrationResult r = Register(f, spec);
        inspect(f, spec, r);
        garbage_ok += r.status == RegStatus::kInitFailed || AllFinite(r);
      } catch (...) {
        ++exceptions;
      }
    }
    // The all-Background frame has no overlap at all.
    try {
      if (Register(frames.front(), spec).status != RegStatus::kInitFailed) garbage_ok = 0;
    } catch (...) {
      ++exceptions;
    }
  }
  Report("[5b] heavy corruption",
         {nonfinite == 0 && below_floor == 0 && exceptions == 0 && garbage_ok == garbage_n,
          Fmt("%zu heavy samples: median %.4f, %zu InitFailed, %zu non-finite, %zu accepted below overlap 0.3 "
              "(min accepted %.3f); %zu/%zu garbage frames handled, %zu exceptions",
              heavy.iou.size(), MedianAt(heavy, 3), heavy_failed, nonfinite, below_floor, worst_overlap,
              garbage_ok, garbage_n, exceptions)});

  Report("[6] IOU_part metric oracle", MetricOracle());
  Report("[7] property suites", PropertySuites(suites));
  Report("[8] end-to-end determinism", EndToEndDeterminism());

  std::printf("%d criteria failed, %.1f s total\n", g_failures, Seconds(t_all));
  return g_failures == 0 ? 0 : 1;
}
