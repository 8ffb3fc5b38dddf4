/* Copyright 2026 The OWS Authors. All Rights Reserved.

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

#include "ows/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <memory>
#include <cstdio>
#include <ostream>
#include <set>

#include <json.hpp>

#include "ows/dataset.hpp"
#include "ows/errors.hpp"
#include "ows/eval.hpp"
#include "ows/fsutil.hpp"
#include "ows/geotiff.hpp"
#include "ows/groundtruth.hpp"
#include "ows/inference.hpp"
#include "ows/instances.hpp"
#include "ows/stack_io.hpp"
#include "ows/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ows {
namespace {

// Times a stage and writes {"stage", "status", "duration_ms", ...} when finished.
class Stage {
 public:
  Stage(std::ostream& log, std::string name)
      : log_(log), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void ok(json extra = json::object()) {
    extra["stage"] = name_;
    extra["status"] = "ok";
    extra["duration_ms"] = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start_)
                               .count();
    log_ << extra.dump() << std::endl;
  }

 private:
  std::ostream& log_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

void require(const fs::path& p, const char* what) {
  if (p.empty()) throw UsageError(std::string("missing required ") + what);
}

Connectivity to_connectivity(int c) {
  if (c == 4) return Connectivity::kFour;
  if (c == 8) return Connectivity::kEight;
  throw UsageError("connectivity must be 4 or 8");
}

void check_stitch_params(const PipelineConfig& cfg) {
  if (cfg.window < 1) throw UsageError("window must be positive");
  if (cfg.stride < 1 || cfg.stride > cfg.window) throw UsageError("stride must lie in [1, window]");
  if (!(cfg.binarize_at >= 0.0f && cfg.binarize_at <= 1.0f))
    throw UsageError("binarize_at must lie in [0, 1]");
  if (cfg.threads < 1) throw UsageError("threads must be positive");
}

StitchConfig stitch_config(const PipelineConfig& cfg) {
  check_stitch_params(cfg);
  return {cfg.window, cfg.stride, cfg.binarize_at, cfg.threads};
}

BinaryMask read_mask(const fs::path& path) { return read_geotiff<std::uint8_t>(path); }

void check_same_grid(const BinaryMask& a, const BinaryMask& b, const fs::path& pa,
                     const fs::path& pb) {
  if (!same_shape(a, b))
    throw DimMismatchError(pa.string() + " and " + pb.string() + " differ in size");
  if (!same_grid(a.transform, b.transform))
    throw GridMismatchError(pa.string() + " and " + pb.string() + " differ in georeferencing");
}

}  // namespace

PipelineConfig apply_config_json(PipelineConfig c, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  auto path_list = [](const json& v) {
    std::vector<fs::path> out;
    if (v.is_string()) {
      out.emplace_back(v.get<std::string>());
    } else {
      for (const auto& e : v) out.emplace_back(e.get<std::string>());
    }
    return out;
  };
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "stack") c.stack = v.get<std::string>();
      else if (key == "mask") c.mask = v.get<std::string>();
      else if (key == "pred") c.preds = path_list(v);
      else if (key == "gt") c.gts = path_list(v);
      else if (key == "centers") c.centers = v.get<std::string>();
      else if (key == "splits") c.splits = v.get<std::string>();
      else if (key == "patches") c.patches = v.get<std::string>();
      else if (key == "spec") c.spec = v.get<std::string>();
      else if (key == "pred_raster") c.pred_raster = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "threshold_db") c.threshold_db = v.get<float>();
      else if (key == "min_area_px") c.min_area_px = v.get<long>();
      else if (key == "patch_size") c.patch_size = v.get<long>();
      else if (key == "clamp") c.clamp = v.get<bool>();
      else if (key == "seed") { c.seed = v.get<std::uint64_t>(); c.seed_set = true; }
      else if (key == "segmenter") c.segmenter = v.get<std::string>();
      else if (key == "model_channels") c.model_channels = v.get<long>();
      else if (key == "frames") c.frames = v.get<long>();
      else if (key == "window") c.window = v.get<long>();
      else if (key == "stride") c.stride = v.get<long>();
      else if (key == "binarize_at") c.binarize_at = v.get<float>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "iou_threshold") c.iou_threshold = v.get<double>();
      else if (key == "connectivity") c.connectivity = v.get<int>();
      else if (key == "csv") c.csv = v.get<std::string>();
      else if (key == "t_list") c.t_list = v.get<std::vector<long>>();
      else if (key == "shuffle") c.shuffle = v.get<std::vector<bool>>();
      else throw UsageError("unknown config key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  return c;
}

OutputLock::OutputLock(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  const fs::path lock = dir / ".ows.lock";
  fd_ = ::open(lock.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open lock file " + lock.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("output directory " + dir.string() + " is in use by another invocation");
  }
}

OutputLock::~OutputLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void cmd_synth(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.out, "--out");
  OutputLock lock(cfg.out);
  Stage stage(log, "synth");
  SyntheticSceneSpec spec;
  if (!cfg.spec.empty()) spec = parse_scene_spec(read_text_file(cfg.spec));
  if (cfg.seed_set) spec.seed = cfg.seed;
  const SyntheticScene scene = generate(spec);
  write_scene(scene, spec, cfg.out);
  stage.ok({{"frames", spec.frames},
            {"n_turbines", scene.gt_labeled.n_instances},
            {"ship_sightings", scene.ship_log.size()},
            {"manifest", (cfg.out / "stack" / "stack.json").string()}});
}

void cmd_groundtruth(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.stack, "--stack");
  require(cfg.out, "--out");
  if (cfg.min_area_px < 0) throw UsageError("min_area_px must be >= 0");
  OutputLock lock(cfg.out);
  Stage stage(log, "groundtruth");
  SarStack stack = load_stack(cfg.stack);
  if (cfg.frames) stack = subset_recent(stack, *cfg.frames);
  const Raster composite = composite_mean(stack);
  const BinaryMask raw = threshold_mask(composite, cfg.threshold_db);
  const BinaryMask mask = clean_mask(raw, cfg.min_area_px);
  write_geotiff(cfg.out / "composite.tif", composite);
  write_geotiff(cfg.out / "gt_mask.tif", mask);
  stage.ok({{"frames", stack.size()},
            {"foreground_px", (mask.values != 0).count()},
            {"removed_px", (raw.values != 0).count() - (mask.values != 0).count()}});
}

void cmd_patches(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.stack, "--stack");
  require(cfg.mask, "--mask");
  require(cfg.centers, "--centers");
  require(cfg.out, "--out");
  if (cfg.patch_size < 1) throw UsageError("patch_size must be positive");
  OutputLock lock(cfg.out);
  Stage stage(log, "patches");
  SarStack stack = load_stack(cfg.stack);
  if (cfg.frames) stack = subset_recent(stack, *cfg.frames);
  const BinaryMask mask = read_mask(cfg.mask);
  const auto centers = read_centers(cfg.centers);
  std::vector<PatchSample> samples = extract_patches(stack, mask, centers, cfg.patch_size, cfg.clamp);
  json extra = {{"patches", samples.size()}};
  if (!cfg.splits.empty()) {
    const SplitSummary summary = assign_splits(samples, read_split_file(cfg.splits));
    // Validation and test samples get a single fixed shuffle; training shuffles per epoch.
    std::vector<std::size_t> eval_idx;
    std::vector<PatchSample> eval_samples;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].split != Split::kTrain) {
        eval_idx.push_back(i);
        eval_samples.push_back(samples[i]);
      }
    const auto shuffled = fixed_eval_shuffle(eval_samples, cfg.seed);
    for (std::size_t k = 0; k < eval_idx.size(); ++k) samples[eval_idx[k]] = shuffled[k];
    write_text_atomically(cfg.out / "splits_summary.json", split_summary_json(summary));
    extra["splits"] = json::parse(split_summary_json(summary));
  }
  write_patch_dataset(samples, cfg.out);
  stage.ok(extra);
}

void cmd_predict(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.stack, "--stack");
  require(cfg.out, "--out");
  const StitchConfig sc = stitch_config(cfg);
  OutputLock lock(cfg.out);
  Stage stage(log, "predict");
  SarStack stack = load_stack(cfg.stack);
  if (cfg.frames) stack = subset_recent(stack, *cfg.frames);
  std::unique_ptr<Segmenter> seg;
  if (cfg.segmenter == "baseline") {
    seg = std::make_unique<BaselineTemporalSegmenter>(cfg.threshold_db, cfg.model_channels);
  } else if (cfg.segmenter == "playback") {
    require(cfg.pred_raster, "--pred-raster");
    seg = std::make_unique<PlaybackSegmenter>(read_geotiff<float>(cfg.pred_raster));
  } else {
    throw UsageError("unknown segmenter \"" + cfg.segmenter + "\"");
  }
  const StitchResult res = stitch_predict(stack, *seg, sc);
  write_geotiff(cfg.out / "probability.tif", res.probability);
  write_geotiff(cfg.out / "pred_mask.tif", res.mask);
  stage.ok({{"segmenter", cfg.segmenter},
            {"frames", stack.size()},
            {"window", sc.window},
            {"stride", sc.stride},
            {"min_coverage", res.coverage.minCoeff()},
            {"foreground_px", (res.mask.values != 0).count()}});
}

void cmd_instances(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.mask, "--mask");
  require(cfg.out, "--out");
  const Connectivity conn = to_connectivity(cfg.connectivity);
  OutputLock lock(cfg.out);
  Stage stage(log, "instances");
  const LabeledMask labeled = connected_components(read_mask(cfg.mask), conn);
  write_geotiff(cfg.out / "labels.tif", labeled.labels);
  write_geojson(cfg.out / "instances.geojson", polygonize(labeled));
  stage.ok({{"n_instances", labeled.n_instances}});
}

void cmd_eval(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.preds.empty() || cfg.gts.empty()) throw UsageError("eval needs --pred and --gt");
  if (cfg.preds.size() != cfg.gts.size())
    throw UsageError("eval needs the same number of --pred and --gt files");
  require(cfg.out, "--out");
  if (!(cfg.iou_threshold >= 0.0 && cfg.iou_threshold <= 1.0))
    throw UsageError("iou_threshold must lie in [0, 1]");
  const Connectivity conn = to_connectivity(cfg.connectivity);
  OutputLock lock(cfg.out);
  Stage stage(log, "eval");
  PixelConfusion confusion;
  ObjectCounts objects;
  for (std::size_t i = 0; i < cfg.preds.size(); ++i) {
    const BinaryMask pred = read_mask(cfg.preds[i]);
    const BinaryMask gt = read_mask(cfg.gts[i]);
    check_same_grid(pred, gt, cfg.preds[i], cfg.gts[i]);
    confusion += pixel_confusion(pred, gt);
    objects += match_objects(connected_components(pred, conn), connected_components(gt, conn),
                             cfg.iou_threshold)
                   .counts;
  }
  EvalConfig ec;
  ec.iou_threshold = cfg.iou_threshold;
  ec.binarize_at = cfg.binarize_at;
  ec.window = cfg.window;
  ec.stride = cfg.stride;
  ec.frames = cfg.frames.value_or(0);
  ec.connectivity = cfg.connectivity;
  const EvalReport report = make_report(confusion, objects, ec);
  write_report(cfg.out / "report.json", report);
  if (!cfg.csv.empty())
    write_text_atomically(cfg.csv, csv_header() + "\n" + csv_row(report) + "\n");
  stage.ok({{"pixel_iou", report.pixel.iou},
            {"overall_quality", report.object.overall_quality},
            {"object_tp", objects.tp},
            {"object_fp", objects.fp},
            {"object_fn", objects.fn}});
}

void cmd_export_coco(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.out, "--out");
  if (cfg.preds.empty() && cfg.patches.empty() && cfg.mask.empty())
    throw UsageError("export-coco needs --mask or --patches");
  const Connectivity conn = to_connectivity(cfg.connectivity);
  OutputLock lock(cfg.out);
  Stage stage(log, "export_coco");
  std::vector<CocoImage> images;
  std::vector<fs::path> masks = cfg.preds;
  if (!cfg.mask.empty()) masks.insert(masks.begin(), cfg.mask);
  for (const auto& m : masks)
    images.push_back({m.filename().string(), connected_components(read_mask(m), conn)});
  if (!cfg.patches.empty()) {
    const auto samples = read_patch_dataset(cfg.patches);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      char name[48];
      std::snprintf(name, sizeof name, "sample_%05zu/image.tif", i);
      images.push_back(
          {name, connected_components(BinaryMask(samples[i].mask, samples[i].transform), conn)});
    }
  }
  export_coco(images, cfg.out / "coco.json");
  stage.ok({{"images", images.size()}});
}

void cmd_experiment(const PipelineConfig& cfg, std::ostream& log) {
  require(cfg.out, "--out");
  if (cfg.stack.empty() && cfg.spec.empty())
    throw UsageError("experiment needs --stack or --spec");
  if (cfg.t_list.empty()) throw UsageError("experiment needs a non-empty T list");
  if (cfg.shuffle.empty()) throw UsageError("experiment needs at least one shuffle setting");
  const StitchConfig sc = stitch_config(cfg);
  const Connectivity conn = to_connectivity(cfg.connectivity);
  OutputLock lock(cfg.out);

  Stage load_stage(log, "experiment_load");
  std::optional<SarStack> stack;
  BinaryMask gt;
  if (!cfg.spec.empty()) {
    SyntheticSceneSpec spec = parse_scene_spec(read_text_file(cfg.spec));
    if (cfg.seed_set) spec.seed = cfg.seed;
    SyntheticScene scene = generate(spec);
    write_scene(scene, spec, cfg.out / "scene");
    stack.emplace(std::move(scene.stack));
    gt = std::move(scene.gt_mask);
  } else {
    stack.emplace(load_stack(cfg.stack));
  }
  if (!cfg.gts.empty()) {
    gt = read_mask(cfg.gts.front());
  } else if (cfg.spec.empty()) {
    gt = clean_mask(threshold_mask(composite_mean(*stack), cfg.threshold_db), cfg.min_area_px);
  }
  const long t_max = static_cast<long>(stack->size());
  for (long t : cfg.t_list)
    if (t < 1 || t > t_max)
      throw UsageError("T=" + std::to_string(t) + " outside [1, " + std::to_string(t_max) + "]");
  if (!same_shape(gt, stack->frames().front()))
    throw DimMismatchError("reference mask size differs from the stack");
  load_stage.ok({{"frames", t_max}});

  const LabeledMask gt_labeled = connected_components(gt, conn);
  std::string csv = "T,shuffle," + csv_header() + "\n";
  for (long t : cfg.t_list) {
    for (bool shuffled : cfg.shuffle) {
      Stage stage(log, "experiment_row");
      const SarStack sub = subset_recent(*stack, t);
      std::vector<Raster> frames = sub.frames();
      if (shuffled)
        frames = permuted_frames(
            sub, random_permutation(static_cast<int>(t),
                                    derive_seed(cfg.seed, static_cast<std::uint64_t>(t), 1)));
      const BaselineTemporalSegmenter seg(cfg.threshold_db, t);
      const StitchResult res = stitch_predict(frames, seg, sc);

      char row_name[32];
      std::snprintf(row_name, sizeof row_name, "T%02ld_%s", t, shuffled ? "shuffled" : "ordered");
      write_geotiff(cfg.out / row_name / "probability.tif", res.probability);
      write_geotiff(cfg.out / row_name / "pred_mask.tif", res.mask);

      const PixelConfusion confusion = pixel_confusion(res.mask, gt);
      const MatchResult match =
          match_objects(connected_components(res.mask, conn), gt_labeled, cfg.iou_threshold);
      EvalConfig ec;
      ec.iou_threshold = cfg.iou_threshold;
      ec.binarize_at = cfg.binarize_at;
      ec.window = cfg.window;
      ec.stride = cfg.stride;
      ec.frames = t;
      ec.connectivity = cfg.connectivity;
      const EvalReport report = make_report(confusion, match.counts, ec);
      write_report(cfg.out / row_name / "report.json", report);
      csv += std::to_string(t) + "," + (shuffled ? "1" : "0") + "," + csv_row(report) + "\n";
      stage.ok({{"T", t},
                {"shuffle", shuffled},
                {"object_fp", match.counts.fp},
                {"overall_quality", report.object.overall_quality}});
    }
  }
  write_text_atomically(cfg.out / "results.csv", csv);
}

}  // namespace ows
