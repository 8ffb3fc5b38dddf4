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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ows {

// Every knob of the command-line pipeline. Loaded from a JSON config file, then
// overridden by flags.
struct PipelineConfig {
  // paths
  std::filesystem::path stack;        // stack manifest
  std::filesystem::path mask;         // binary mask GeoTIFF (groundtruth or prediction)
  std::vector<std::filesystem::path> preds;  // eval / export inputs
  std::vector<std::filesystem::path> gts;
  std::filesystem::path centers;      // GeoJSON points
  std::filesystem::path splits;       // split file
  std::filesystem::path patches;      // patch dataset directory
  std::filesystem::path spec;         // synthetic scene spec
  std::filesystem::path pred_raster;  // playback source
  std::filesystem::path out;          // output directory

  // groundtruth
  float threshold_db = 0.0f;
  long min_area_px = 2;
  // dataset
  long patch_size = 128;
  bool clamp = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  // stitching
  std::string segmenter = "baseline";
  std::optional<long> model_channels;
  std::optional<long> frames;  // use only the most recent N frames
  long window = 128;
  long stride = 64;
  float binarize_at = 0.5f;
  int threads = 1;
  // eval
  double iou_threshold = 0.5;
  int connectivity = 8;
  std::filesystem::path csv;
  // experiment
  std::vector<long> t_list = {1, 5, 10, 15};
  std::vector<bool> shuffle = {false};
};

// Overlays the keys present in `json_text` onto `base`. Unknown keys are a UsageError.
PipelineConfig apply_config_json(PipelineConfig base, const std::string& json_text);

// Each command validates its inputs, writes artifacts atomically into cfg.out, and emits
// one JSON log line per stage to `log`. Errors surface as ows::Error subclasses.
void cmd_synth(const PipelineConfig& cfg, std::ostream& log);
void cmd_groundtruth(const PipelineConfig& cfg, std::ostream& log);
void cmd_patches(const PipelineConfig& cfg, std::ostream& log);
void cmd_predict(const PipelineConfig& cfg, std::ostream& log);
void cmd_instances(const PipelineConfig& cfg, std::ostream& log);
void cmd_eval(const PipelineConfig& cfg, std::ostream& log);
void cmd_export_coco(const PipelineConfig& cfg, std::ostream& log);
void cmd_experiment(const PipelineConfig& cfg, std::ostream& log);

// Advisory exclusive lock on <dir>/.ows.lock, held for the object's lifetime.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace ows
