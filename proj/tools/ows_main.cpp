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

// ows: command-line front end for the offshore wind segmentation pipeline.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"
#include "ows/pipeline.hpp"

namespace {

using Override = std::function<void(ows::PipelineConfig&)>;

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  void (*run)(const ows::PipelineConfig&, std::ostream&) = nullptr;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, Override>> overrides;

  template <typename T, typename Apply>
  void flag(const std::string& spec, const std::string& help, Apply apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(spec, *value, help);
    overrides.emplace_back(opt, [value, apply](ows::PipelineConfig& c) { apply(c, *value); });
  }
  void toggle(const std::string& spec, const std::string& help,
              std::function<void(ows::PipelineConfig&)> apply) {
    CLI::Option* opt = app->add_flag(spec, help);
    overrides.emplace_back(opt, std::move(apply));
  }
};

void add_common(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_path, "JSON config file; flags override it");
  cmd.flag<std::string>("--out", "Output directory",
                        [](auto& c, const std::string& v) { c.out = v; });
  cmd.flag<std::uint64_t>("--seed", "Global seed", [](auto& c, std::uint64_t v) {
    c.seed = v;
    c.seed_set = true;
  });
  cmd.flag<int>("--threads", "Worker threads (fallback: OWS_THREADS)",
                [](auto& c, int v) { c.threads = v; });
  cmd.flag<long>("--window", "Sliding window size in pixels",
                 [](auto& c, long v) { c.window = v; });
  cmd.flag<long>("--stride", "Sliding window stride in pixels",
                 [](auto& c, long v) { c.stride = v; });
  cmd.flag<double>("--iou-threshold", "Object match IoU threshold (strict)",
                   [](auto& c, double v) { c.iou_threshold = v; });
  cmd.flag<std::string>("--pred-raster", "Probability raster for the playback segmenter",
                        [](auto& c, const std::string& v) { c.pred_raster = v; });
}

void add_stack(Command& cmd) {
  cmd.flag<std::string>("--stack", "Stack manifest JSON",
                        [](auto& c, const std::string& v) { c.stack = v; });
  cmd.flag<long>("--frames", "Use only the N most recent frames",
                 [](auto& c, long v) { c.frames = v; });
}

void add_threshold(Command& cmd) {
  cmd.flag<float>("--threshold-db", "dB threshold (strict)",
                  [](auto& c, float v) { c.threshold_db = v; });
}

void add_connectivity(Command& cmd) {
  cmd.flag<int>("--connectivity", "4 or 8", [](auto& c, int v) { c.connectivity = v; });
}

int report_error(const std::string& stage, const char* name, const std::string& what, int code) {
  nlohmann::json line = {{"stage", stage}, {"status", "error"}, {"error", name},
                         {"message", what}, {"exit_code", code}};
  std::cerr << line.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offshore wind plant detection pipeline for SAR time series"};
  app.require_subcommand(1);
  std::vector<Command> cmds;
  cmds.reserve(8);
  auto make = [&](const std::string& name, const std::string& help,
                  void (*run)(const ows::PipelineConfig&, std::ostream&)) -> Command& {
    Command& c = cmds.emplace_back();
    c.app = app.add_subcommand(name, help);
    c.name = name;
    c.run = run;
    add_common(c);
    return c;
  };

  {
    Command& c = make("synth", "Generate a synthetic scene", ows::cmd_synth);
    c.flag<std::string>("--spec", "Scene spec JSON",
                        [](auto& cfg, const std::string& v) { cfg.spec = v; });
  }
  {
    Command& c = make("groundtruth", "Composite and threshold a stack into a mask",
                      ows::cmd_groundtruth);
    add_stack(c);
    add_threshold(c);
    c.flag<long>("--min-area", "Drop components smaller than this many pixels",
                 [](auto& cfg, long v) { cfg.min_area_px = v; });
  }
  {
    Command& c = make("patches", "Cut the patch dataset", ows::cmd_patches);
    add_stack(c);
    c.flag<std::string>("--mask", "Ground-truth mask GeoTIFF",
                        [](auto& cfg, const std::string& v) { cfg.mask = v; });
    c.flag<std::string>("--centers", "GeoJSON center points",
                        [](auto& cfg, const std::string& v) { cfg.centers = v; });
    c.flag<std::string>("--splits", "Split file",
                        [](auto& cfg, const std::string& v) { cfg.splits = v; });
    c.flag<long>("--patch-size", "Patch size in pixels",
                 [](auto& cfg, long v) { cfg.patch_size = v; });
    c.toggle("--clamp", "Shift windows inward at raster edges",
             [](ows::PipelineConfig& cfg) { cfg.clamp = true; });
  }
  {
    Command& c = make("predict", "Sliding-window prediction", ows::cmd_predict);
    add_stack(c);
    add_threshold(c);
    c.flag<std::string>("--segmenter", "baseline | playback",
                        [](auto& cfg, const std::string& v) { cfg.segmenter = v; });
    c.flag<long>("--model-channels", "Channel count the segmenter expects",
                 [](auto& cfg, long v) { cfg.model_channels = v; });
    c.flag<float>("--binarize-at", "Probability threshold for the output mask",
                  [](auto& cfg, float v) { cfg.binarize_at = v; });
  }
  {
    Command& c = make("instances", "Label instances and polygonize", ows::cmd_instances);
    c.flag<std::string>("--mask", "Binary mask GeoTIFF",
                        [](auto& cfg, const std::string& v) { cfg.mask = v; });
    add_connectivity(c);
  }
  {
    Command& c = make("eval", "Pixel and object metrics", ows::cmd_eval);
    c.flag<std::vector<std::string>>("--pred", "Predicted mask(s)",
                                     [](auto& cfg, const std::vector<std::string>& v) {
                                       cfg.preds.assign(v.begin(), v.end());
                                     });
    c.flag<std::vector<std::string>>("--gt", "Reference mask(s)",
                                     [](auto& cfg, const std::vector<std::string>& v) {
                                       cfg.gts.assign(v.begin(), v.end());
                                     });
    c.flag<std::string>("--csv", "Also write a CSV row here",
                        [](auto& cfg, const std::string& v) { cfg.csv = v; });
    add_connectivity(c);
  }
  {
    Command& c = make("export-coco", "COCO instance annotations", ows::cmd_export_coco);
    c.flag<std::vector<std::string>>("--mask", "Binary mask GeoTIFF(s)",
                                     [](auto& cfg, const std::vector<std::string>& v) {
                                       cfg.preds.assign(v.begin(), v.end());
                                     });
    c.flag<std::string>("--patches", "Patch dataset directory",
                        [](auto& cfg, const std::string& v) { cfg.patches = v; });
    add_connectivity(c);
  }
  {
    Command& c = make("experiment", "Time-series length sweep", ows::cmd_experiment);
    c.flag<std::string>("--stack", "Stack manifest JSON",
                        [](auto& cfg, const std::string& v) { cfg.stack = v; });
    c.flag<std::string>("--spec", "Synthetic scene spec JSON (instead of --stack)",
                        [](auto& cfg, const std::string& v) { cfg.spec = v; });
    c.flag<std::vector<std::string>>("--gt", "Reference mask",
                                     [](auto& cfg, const std::vector<std::string>& v) {
                                       cfg.gts.assign(v.begin(), v.end());
                                     });
    c.flag<std::vector<long>>("--t-list", "Frame counts, e.g. 1,5,10,15",
                              [](auto& cfg, const std::vector<long>& v) { cfg.t_list = v; });
    c.flag<std::vector<int>>("--shuffle", "Shuffle settings, e.g. 0,1",
                             [](auto& cfg, const std::vector<int>& v) {
                               cfg.shuffle.assign(v.begin(), v.end());
                             });
    add_threshold(c);
    add_connectivity(c);
    c.app->get_option("--t-list")->delimiter(',');
    c.app->get_option("--shuffle")->delimiter(',');
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return static_cast<int>(ows::ErrorKind::kUsage);
  }

  for (const Command& cmd : cmds) {
    if (!cmd.app->parsed()) continue;
    try {
      ows::PipelineConfig cfg;
      if (!cmd.config_path.empty())
        cfg = ows::apply_config_json(cfg, ows::read_text_file(cmd.config_path));
      if (const char* env = std::getenv("OWS_THREADS"); env && *env) cfg.threads = std::atoi(env);
      for (const auto& [opt, apply] : cmd.overrides)
        if (opt->count() > 0) apply(cfg);
      cmd.run(cfg, std::cerr);
      return 0;
    } catch (const ows::Error& e) {
      return report_error(cmd.name, e.name(), e.what(), static_cast<int>(e.kind()));
    } catch (const std::filesystem::filesystem_error& e) {
      return report_error(cmd.name, "IoError", e.what(), static_cast<int>(ows::ErrorKind::kIo));
    } catch (const std::exception& e) {
      return report_error(cmd.name, "DataError", e.what(),
                          static_cast<int>(ows::ErrorKind::kData));
    }
  }
  return static_cast<int>(ows::ErrorKind::kUsage);
}
