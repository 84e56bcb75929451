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

#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "overlay.hpp"
#include "rinkreg/camera_model.hpp"
#include "rinkreg/errors.hpp"
#include "rinkreg/io.hpp"
#include "rinkreg/metrics.hpp"
#include "rinkreg/parallel.hpp"
#include "rinkreg/random.hpp"
#include "rinkreg/registration.hpp"
#include "rinkreg/synthdata.hpp"

namespace rinkreg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int DefaultJobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

void SetUpLogging() {
  auto logger = spdlog::get("rinkreg");
  if (!logger) logger = spdlog::stderr_color_mt("rinkreg");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("RINKREG_LOG")) {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only "off" itself should.
    if (level == spdlog::level::off && std::string_view(env) != "off") {
      level = spdlog::level::info;
      spdlog::warn("unknown RINKREG_LOG level '{}', using info", env);
    }
  }
  spdlog::set_level(level);
}

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Writes the subcommand's effective options, defaults included, as a TOML
// section that `--config` accepts back.
void WriteResolvedConfig(const CLI::App& sub, const fs::path& path) {
  std::istringstream in(sub.config_to_str(true, false));
  std::string text = "[" + sub.get_name() + "]\n", line;
  while (std::getline(in, line)) {
    // Unset paths would fail their existence checks on reload.
    if (line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0) continue;
    text += line + "\n";
  }
  WriteFileAtomic(path, text);
}

// ---------------------------------------------------------------------------
// rinkgen

struct RinkgenArgs {
  int n = 200;
  std::uint64_t seed = 0;
  std::string out;
  std::string ranges;
};

Interval ReadInterval(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("ranges: '" + key + "' must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

RandomizationRanges ReadRanges(const fs::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path.string() + ": expected an object");
  RandomizationRanges r;
  const std::map<std::string, Interval*> intervals = {
      {"length", &r.length},
      {"width", &r.width},
      {"corner_radius_fraction", &r.corner_radius_fraction},
      {"goal_line_offset", &r.goal_line_offset},
      {"blue_line_offset", &r.blue_line_offset},
      {"centre_circle_radius", &r.centre_circle_radius},
      {"outer_faceoff_circle_radius", &r.outer_faceoff_circle_radius},
      {"outer_faceoff_from_goal_line", &r.outer_faceoff_from_goal_line},
      {"outer_faceoff_y_fraction", &r.outer_faceoff_y_fraction},
      {"inner_spot_from_blue_line", &r.inner_spot_from_blue_line},
      {"spot_radius", &r.spot_radius},
      {"crease_radius", &r.crease_radius},
  };
  for (const auto& [key, value] : j.items()) {
    if (const auto it = intervals.find(key); it != intervals.end()) {
      *it->second = ReadInterval(value, key);
    } else if (key == "line_thickness" || key == "goal_width") {
      if (!value.is_number()) throw ParseError("ranges: '" + key + "' must be a number");
      (key == "line_thickness" ? r.line_thickness : r.goal_width) = value.get<double>();
    } else {
      throw ParseError(path.string() + ": unknown key '" + key + "'");
    }
  }
  return r;
}

void CmdRinkgen(const CLI::App& sub, const RinkgenArgs& a) {
  if (a.n < 0) throw std::invalid_argument("--n must be >= 0");
  const RandomizationRanges ranges = a.ranges.empty() ? RandomizationRanges{} : ReadRanges(a.ranges);
  const fs::path out(a.out);
  MakeDirs(out);
  json index = json::array();
  for (int i = 0; i < a.n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "rink_%04d", i);
    const std::string file = std::string(id) + ".json";
    WriteRinkSpec(out / file, RandomSpec(ChildSeed(a.seed, static_cast<std::uint64_t>(i)), ranges));
    index.push_back({{"id", id}, {"file", file}});
  }
  WriteFileAtomic(out / "index.json", json{{"specs", index}}.dump(2) + "\n");
  WriteResolvedConfig(sub, out / "rinkgen.config.toml");
  spdlog::info("wrote {} rink specs to {}", a.n, out.string());
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string specs_dir;
  std::vector<std::string> presets;
  std::string profile = "clean";
  int n_per_spec = 1;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = DefaultJobs();
  std::string camera_pool;
  double perturb_px = HAugmentConfig{}.perturb_px;
  double zoom_min = HAugmentConfig{}.zoom_range.lo;
  double zoom_max = HAugmentConfig{}.zoom_range.hi;
  double flip_prob = HAugmentConfig{}.flip_prob;
};

// Specs listed by <dir>/index.json when present, else every *.json in name
// order.
std::vector<SpecEntry> LoadSpecDir(const fs::path& dir) {
  std::vector<SpecEntry> out;
  const fs::path index = dir / "index.json";
  if (fs::exists(index)) {
    try {
      const json j = json::parse(ReadFile(index));
      for (const auto& e : j.at("specs")) {
        const std::string file = e.at("file").get<std::string>();
        out.push_back({e.at("id").get<std::string>(), file, ReadRinkSpec(dir / file)});
      }
    } catch (const json::exception& e) {
      throw ParseError(index.string() + ": " + e.what());
    }
    return out;
  }
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back({f.stem().string(), f.filename().string(), ReadRinkSpec(f)});
  return out;
}

void CmdSynth(const CLI::App& sub, const SynthArgs& a) {
  if (a.n_per_spec < 1) throw std::invalid_argument("--n-per-spec must be >= 1");
  if (a.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  DatasetConfig cfg;
  for (const auto& p : a.presets) {
    if (p == "nhl") {
      cfg.specs.push_back({"nhl", "", PresetSpec(RinkPreset::kNHL)});
    } else if (p == "iihf") {
      cfg.specs.push_back({"iihf", "", PresetSpec(RinkPreset::kIIHF)});
    } else {
      throw std::invalid_argument("unknown preset '" + p + "' (nhl, iihf)");
    }
  }
  if (!a.specs_dir.empty()) {
    for (auto& e : LoadSpecDir(a.specs_dir)) cfg.specs.push_back(std::move(e));
  }
  if (cfg.specs.empty()) throw std::invalid_argument("no rink specs: pass --specs and/or --preset");
  std::set<std::string> ids;
  for (const auto& e : cfg.specs) {
    if (!ids.insert(e.id).second) throw std::invalid_argument("duplicate spec id '" + e.id + "'");
  }
  cfg.n_per_spec = a.n_per_spec;
  cfg.profile = NamedProfile(a.profile);
  cfg.seed = a.seed;
  cfg.h_cfg.base_pool = a.camera_pool.empty() ? GenerateCameraPool() : LoadCameraPool(a.camera_pool);
  cfg.h_cfg.perturb_px = a.perturb_px;
  cfg.h_cfg.zoom_range = {a.zoom_min, a.zoom_max};
  cfg.h_cfg.flip_prob = a.flip_prob;
  Validate(cfg.h_cfg);

  const fs::path out(a.out);
  MakeDirs(out);
  const auto entries = WriteDataset(cfg, out, a.jobs);
  WriteResolvedConfig(sub, out / "synth.config.toml");
  spdlog::info("wrote {} samples ({} specs x {}) to {}", entries.size(), cfg.specs.size(), cfg.n_per_spec,
               (out / "manifest.jsonl").string());
}

// ---------------------------------------------------------------------------
// register

struct RegisterArgs {
  std::string manifest;
  std::string frame;
  std::string spec;
  std::string out;
  int iters = 3;
  int jobs = DefaultJobs();
  std::uint64_t seed = 0;
  bool overlay = false;
  InitConfig init;
  RefineConfig refine;
  std::string objective = std::string(RefineObjectiveName(RefineConfig{}.objective));
};

struct RegisterItem {
  std::string id;
  fs::path frame;
  fs::path spec;
  std::optional<Homography> truth;
};

void CmdRegister(const CLI::App& sub, RegisterArgs a) {
  if (a.iters < 0) throw std::invalid_argument("--iters must be >= 0");
  if (a.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  a.refine.objective = ParseRefineObjective(a.objective);
  a.init.Validate();
  a.refine.Validate();

  std::vector<RegisterItem> items;
  if (!a.manifest.empty()) {
    if (!a.frame.empty() || !a.spec.empty()) throw std::invalid_argument("--manifest excludes --frame/--spec");
    for (const auto& e : ReadManifest(a.manifest)) {
      items.push_back({e.id, ResolveManifestPath(a.manifest, e.seg_png), ResolveManifestPath(a.manifest, e.spec_file),
                       e.h_gt});
    }
  } else {
    if (a.frame.empty() || a.spec.empty()) throw std::invalid_argument("pass --manifest, or --frame with --spec");
    items.push_back({fs::path(a.frame).stem().string(), a.frame, a.spec, std::nullopt});
  }

  std::map<fs::path, RinkSpec> specs;
  for (const auto& it : items) {
    if (!specs.count(it.spec)) specs.emplace(it.spec, ReadRinkSpec(it.spec));
  }
  std::map<fs::path, SegMap> templates;
  for (const auto& [path, spec] : specs) templates.emplace(path, Rasterize(spec));

  const fs::path out(a.out);
  MakeDirs(out);
  if (a.overlay) MakeDirs(out / "overlays");

  std::vector<std::string> lines(items.size());
  std::vector<RegStatus> statuses(items.size());
  ParallelFor(items.size(), a.jobs, [&](std::size_t i) {
    const RegisterItem& item = items[i];
    InitConfig init = a.init;
    init.seed = ChildSeed(a.seed, i);
    RegistrationResult r;
    r.status = RegStatus::kInitFailed;
    std::optional<SegMap> frame;
    try {
      frame = ReadSegMap(item.frame);
      r = Register(*frame, specs.at(item.spec), init, a.refine, a.iters);
    } catch (const Error& e) {
      spdlog::warn("{}: {}", item.id, e.what());
    }
    statuses[i] = r.status;
    lines[i] = RegistrationResultToJson(r, item.id);
    spdlog::debug("{}: {}", item.id, RegStatusName(r.status));
    if (a.overlay && frame) {
      const bool ok = r.status != RegStatus::kInitFailed;
      const auto rgb = RenderOverlay(*frame, templates.at(item.spec), ok ? std::optional(r.h_init) : std::nullopt,
                                     ok ? std::optional(r.h_final) : std::nullopt, item.truth);
      WriteRgbPng(out / "overlays" / (item.id + ".png"), frame->width(), frame->height(), rgb);
    }
  });

  std::string text;
  for (const auto& l : lines) text += l + "\n";
  WriteFileAtomic(out / "predictions.jsonl", text);
  WriteResolvedConfig(sub, out / "register.config.toml");
  const auto failed = std::count(statuses.begin(), statuses.end(), RegStatus::kInitFailed);
  spdlog::info("registered {} samples ({} InitFailed) -> {}", items.size(), failed,
               (out / "predictions.jsonl").string());
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string manifest;
  std::string predictions;
  std::string out;
  std::string clip = "rink";
  std::string label = "rinkreg";
  std::string register_config;
  int jobs = DefaultJobs();
};

std::map<std::string, std::optional<Homography>> ReadPredictions(const fs::path& path) {
  std::istringstream in(ReadFile(path));
  std::map<std::string, std::optional<Homography>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    RegistrationResult r;
    try {
      r = RegistrationResultFromJson(line, &id);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (id.empty()) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": prediction without id");
    std::optional<Homography> h;
    if (r.status != RegStatus::kInitFailed) h = r.h_final;
    if (!out.emplace(id, h).second) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": duplicate id '" + id + "'");
    }
  }
  return out;
}

void CmdEval(const CLI::App& sub, const EvalArgs& a) {
  if (a.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  const ClipMode mode = ParseClipMode(a.clip);
  const auto entries = ReadManifest(a.manifest);
  std::map<fs::path, RinkSpec> specs;
  std::vector<EvalItem> items;
  items.reserve(entries.size());
  for (const auto& e : entries) {
    const fs::path sp = ResolveManifestPath(a.manifest, e.spec_file);
    if (!specs.count(sp)) specs.emplace(sp, ReadRinkSpec(sp));
  }
  std::vector<Size2> sizes(entries.size());
  ParallelFor(entries.size(), a.jobs, [&](std::size_t i) {
    const SegMap frame = ReadSegMap(ResolveManifestPath(a.manifest, entries[i].seg_png));
    sizes[i] = {frame.width(), frame.height()};
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    items.push_back({entries[i].id, entries[i].h_gt, &specs.at(ResolveManifestPath(a.manifest, entries[i].spec_file)),
                     sizes[i]});
  }
  const auto predictions = ReadPredictions(a.predictions);

  EvalReport report = Evaluate(items, predictions, mode, a.jobs);
  report.label = a.label;
  fs::path reg_cfg = a.register_config;
  if (reg_cfg.empty()) reg_cfg = fs::path(a.predictions).parent_path() / "register.config.toml";
  if (fs::exists(reg_cfg)) {
    report.config_hash = Sha256Hex(HashableRegisterConfig(ReadFile(reg_cfg)));
  } else {
    spdlog::warn("no register config at {}; config_hash left empty", reg_cfg.string());
  }

  const fs::path out(a.out);
  MakeDirs(out);
  const std::string table = ReportToTable(std::span<const EvalReport>(&report, 1));
  WriteFileAtomic(out / "report.json", ReportToJson(report) + "\n");
  WriteFileAtomic(out / "report.txt", table);
  WriteResolvedConfig(sub, out / "eval.config.toml");
  std::fputs(table.c_str(), stdout);
}

// ---------------------------------------------------------------------------
// camera-pool, calibrate-scales

struct PoolArgs {
  std::string out;
  int count = kCameraPoolSize;
  std::uint64_t seed = kCameraPoolSeed;
};

struct ScalesArgs {
  std::string pool;
  int draws = 10000;
  std::string out;
};

void CmdCameraPool(const PoolArgs& a) {
  if (a.count < 1) throw std::invalid_argument("--count must be >= 1");
  const fs::path out(a.out);
  if (out.has_parent_path()) MakeDirs(out.parent_path());
  SaveCameraPool(out.string(), GenerateCameraPool(a.count, a.seed));
  spdlog::info("wrote {} camera poses to {}", a.count, out.string());
}

void CmdCalibrateScales(const ScalesArgs& a) {
  HAugmentConfig cfg;
  cfg.base_pool = a.pool.empty() ? GenerateCameraPool() : LoadCameraPool(a.pool);
  const auto scales = CalibrateNormalizationScales(cfg, a.draws);
  std::string text;
  char buf[40];
  for (int k = 0; k < 8; ++k) {
    std::snprintf(buf, sizeof(buf), "%s%.4g", k ? " " : "", scales[k]);
    text += buf;
  }
  text += "\n";
  if (!a.out.empty()) WriteFileAtomic(a.out, text);
  std::fputs(text.c_str(), stdout);
}

}  // namespace

std::string HashableRegisterConfig(std::string_view resolved_toml) {
  static const std::set<std::string> kLocationKeys = {"manifest", "frame", "spec", "out", "jobs", "overlay"};
  std::istringstream in{std::string(resolved_toml)};
  std::string line, out;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      std::string key = line.substr(0, eq);
      key.erase(key.find_last_not_of(" \t") + 1);
      key.erase(0, key.find_first_not_of(" \t"));
      if (kLocationKeys.count(key)) continue;
    }
    out += line + "\n";
  }
  return out;
}

int Run(int argc, const char* const* argv) {
  SetUpLogging();
  CLI::App app{"rinkreg: hockey rink template registration on segmentation maps"};
  app.name("rinkreg");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto add_sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->allow_config_extras(CLI::config_extras_mode::error);
    return s;
  };

  RinkgenArgs rg;
  CLI::App* rinkgen = add_sub("rinkgen", "Generate random rink specs and an index");
  rinkgen->add_option("--n", rg.n, "Number of specs")->capture_default_str();
  rinkgen->add_option("--seed", rg.seed, "Master seed")->capture_default_str();
  rinkgen->add_option("--out", rg.out, "Output directory")->required();
  rinkgen->add_option("--ranges", rg.ranges, "JSON file overriding randomization ranges")->check(CLI::ExistingFile);

  SynthArgs sy;
  CLI::App* synth = add_sub("synth", "Generate a synthetic dataset (manifest + frame rasters)");
  synth->add_option("--specs", sy.specs_dir, "Directory of rink spec JSON files")->check(CLI::ExistingDirectory);
  synth->add_option("--preset", sy.presets, "Preset rinks to include (nhl, iihf)");
  synth->add_option("--profile", sy.profile, "Corruption profile")
      ->check(CLI::IsMember({"clean", "mild", "heavy"}))
      ->capture_default_str();
  synth->add_option("--n-per-spec", sy.n_per_spec, "Samples per spec")->capture_default_str();
  synth->add_option("--seed", sy.seed, "Master seed")->capture_default_str();
  synth->add_option("--out", sy.out, "Output directory")->required();
  synth->add_option("--jobs", sy.jobs, "Worker threads")->capture_default_str();
  synth->add_option("--camera-pool", sy.camera_pool, "Camera pool file (default: built-in pool)")
      ->check(CLI::ExistingFile);
  synth->add_option("--perturb-px", sy.perturb_px, "Max corner jitter, frame px")->capture_default_str();
  synth->add_option("--zoom-min", sy.zoom_min, "Minimum zoom factor")->capture_default_str();
  synth->add_option("--zoom-max", sy.zoom_max, "Maximum zoom factor")->capture_default_str();
  synth->add_option("--flip-prob", sy.flip_prob, "Horizontal flip probability")->capture_default_str();

  RegisterArgs re;
  CLI::App* reg = add_sub("register", "Register frames to their rink templates");
  reg->add_option("--manifest", re.manifest, "Dataset manifest")->check(CLI::ExistingFile);
  reg->add_option("--frame", re.frame, "Single frame segmentation PNG")->check(CLI::ExistingFile);
  reg->add_option("--spec", re.spec, "Rink spec JSON for --frame")->check(CLI::ExistingFile);
  reg->add_option("--out", re.out, "Output directory")->required();
  reg->add_option("--iters", re.iters, "Refinement iterations")->capture_default_str();
  reg->add_option("--jobs", re.jobs, "Worker threads")->capture_default_str();
  reg->add_option("--seed", re.seed, "Master seed")->capture_default_str();
  reg->add_flag("--overlay", re.overlay, "Write overlay PNGs (light = initial, dark = final, green = truth)");
  reg->add_option("--ransac-iters", re.init.ransac_iters, "RANSAC hypotheses")->capture_default_str();
  reg->add_option("--inlier-tol", re.init.inlier_tol_px, "RANSAC inlier tolerance, px")->capture_default_str();
  reg->add_option("--min-keypoints", re.init.min_keypoints, "Keypoints needed for RANSAC")->capture_default_str();
  reg->add_option("--fallback-grid", re.init.fallback_grid, "Pose grid samples per axis")->capture_default_str();
  reg->add_option("--min-overlap", re.init.min_overlap, "InitFailed below this soft IoU")->capture_default_str();
  reg->add_option("--accept-overlap", re.init.accept_overlap, "Also try the pose grid below this soft IoU")
      ->capture_default_str();
  reg->add_option("--objective", re.objective, "Refinement objective")
      ->check(CLI::IsMember({std::string(RefineObjectiveName(RefineObjective::kL1Mask)),
                             std::string(RefineObjectiveName(RefineObjective::kSmoothL1CornersPlusL1Mask))}))
      ->capture_default_str();
  reg->add_option("--corner-step", re.refine.corner_step_px, "Initial simplex step, px")->capture_default_str();
  reg->add_option("--max-evals", re.refine.max_evals, "Objective evaluations per iteration")->capture_default_str();
  reg->add_option("--accept-tol", re.refine.accept_tol, "Minimum relative improvement")->capture_default_str();
  reg->add_option("--work-long-side", re.refine.work_long_side, "Objective working resolution, px")
      ->capture_default_str();
  reg->add_option("--blur-px", re.refine.blur_px, "Soft-mask box kernel width, px")->capture_default_str();
  reg->add_option("--corner-weight", re.refine.corner_weight, "Corner prior weight")->capture_default_str();

  EvalArgs ev;
  CLI::App* eval = add_sub("eval", "Score predictions against manifest ground truth");
  eval->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", ev.predictions, "predictions.jsonl from register")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", ev.out, "Output directory")->required();
  eval->add_option("--clip", ev.clip, "IOU_part clip region")
      ->check(CLI::IsMember({"rink", "template"}))
      ->capture_default_str();
  eval->add_option("--label", ev.label, "Report label")->capture_default_str();
  eval->add_option("--register-config", ev.register_config,
                   "Resolved register config to hash (default: beside the predictions)");
  eval->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str();

  PoolArgs pa;
  CLI::App* pool = add_sub("camera-pool", "Write the synthetic broadcast camera pool");
  pool->add_option("--out", pa.out, "Output file")->required();
  pool->add_option("--count", pa.count, "Number of poses")->capture_default_str();
  pool->add_option("--seed", pa.seed, "Pool seed")->capture_default_str();

  ScalesArgs sa;
  CLI::App* scales = add_sub("calibrate-scales", "Recompute homography normalization scales");
  scales->add_option("--pool", sa.pool, "Camera pool file (default: built-in pool)")->check(CLI::ExistingFile);
  scales->add_option("--draws", sa.draws, "Augmented draws")->capture_default_str();
  scales->add_option("--out", sa.out, "Also write the scales to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*rinkgen) CmdRinkgen(*rinkgen, rg);
    if (*synth) CmdSynth(*synth, sy);
    if (*reg) CmdRegister(*reg, re);
    if (*eval) CmdEval(*eval, ev);
    if (*pool) CmdCameraPool(pa);
    if (*scales) CmdCalibrateScales(sa);
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace rinkreg::cli
