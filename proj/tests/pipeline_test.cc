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

#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"
#include "ows/geotiff.hpp"
#include "ows/synth.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace ows {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_small_spec(const fs::path& p, std::uint64_t seed = 5) {
  write_text_atomically(p, json{{"width", 96}, {"height", 80}, {"n_turbines", 6}, {"n_ships", 3},
                                {"seed", seed}}
                               .dump());
}

class PipelineTest : public ::testing::Test {
 protected:
  testing::TempDir dir_;
  std::ostringstream log_;

  PipelineConfig base() const {
    PipelineConfig c;
    c.window = 32;
    c.stride = 16;
    return c;
  }

  fs::path synth(const std::string& name = "scene") {
    write_small_spec(dir_.path() / "spec.json");
    PipelineConfig c = base();
    c.spec = dir_.path() / "spec.json";
    c.out = dir_.path() / name;
    cmd_synth(c, log_);
    return c.out;
  }
};

TEST_F(PipelineTest, EndToEndOnSyntheticScene) {
  const fs::path scene = synth();
  PipelineConfig c = base();
  c.stack = scene / "stack" / "stack.json";
  c.out = dir_.path() / "gt";
  cmd_groundtruth(c, log_);

  c.out = dir_.path() / "pred";
  c.threads = 3;
  cmd_predict(c, log_);

  c.mask = dir_.path() / "pred" / "pred_mask.tif";
  c.out = dir_.path() / "inst";
  cmd_instances(c, log_);
  EXPECT_TRUE(fs::exists(dir_.path() / "inst" / "instances.geojson"));

  c.preds = {dir_.path() / "pred" / "pred_mask.tif"};
  c.gts = {dir_.path() / "gt" / "gt_mask.tif"};
  c.out = dir_.path() / "eval";
  c.csv = dir_.path() / "eval" / "row.csv";
  cmd_eval(c, log_);
  const json report = json::parse(read_text_file(dir_.path() / "eval" / "report.json"));
  EXPECT_EQ(report["object"]["overall_quality"], 1.0);
  EXPECT_EQ(report["object"]["tp"], 6);
  EXPECT_EQ(report["pixel"]["iou"], 1.0);

  const auto gt = read_geotiff<std::uint8_t>(dir_.path() / "gt" / "gt_mask.tif");
  const auto truth = read_geotiff<std::uint8_t>(scene / "gt_mask.tif");
  EXPECT_TRUE((gt.values == truth.values).all());

  // Every stage wrote one JSON line.
  std::istringstream lines(log_.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    EXPECT_TRUE(j.contains("stage"));
    ++n;
  }
  EXPECT_EQ(n, 5);
}

TEST_F(PipelineTest, PlaybackReproducesBaseline) {
  const fs::path scene = synth();
  PipelineConfig c = base();
  c.stack = scene / "stack" / "stack.json";
  c.out = dir_.path() / "base";
  cmd_predict(c, log_);
  c.segmenter = "playback";
  c.pred_raster = dir_.path() / "base" / "probability.tif";
  c.out = dir_.path() / "play";
  c.stride = 8;
  cmd_predict(c, log_);
  EXPECT_EQ(testing::read_bytes(dir_.path() / "base" / "probability.tif"),
            testing::read_bytes(dir_.path() / "play" / "probability.tif"));
}

TEST_F(PipelineTest, PatchesAndCoco) {
  const fs::path scene = synth();
  PipelineConfig c = base();
  c.stack = scene / "stack" / "stack.json";
  c.mask = scene / "gt_mask.tif";
  c.centers = scene / "turbines.geojson";
  c.splits = scene / "splits.json";
  c.patch_size = 16;
  c.clamp = true;
  c.seed = 3;
  c.out = dir_.path() / "patches";
  cmd_patches(c, log_);
  EXPECT_TRUE(fs::exists(dir_.path() / "patches" / "index.json"));
  EXPECT_TRUE(fs::exists(dir_.path() / "patches" / "splits_summary.json"));

  PipelineConfig e = base();
  e.patches = dir_.path() / "patches";
  e.out = dir_.path() / "coco";
  cmd_export_coco(e, log_);
  const json coco = json::parse(read_text_file(dir_.path() / "coco" / "coco.json"));
  EXPECT_EQ(coco["images"].size(), 6u);
  EXPECT_GE(coco["annotations"].size(), 6u);
}

TEST_F(PipelineTest, ErrorKinds) {
  const fs::path scene = synth();
  PipelineConfig c = base();
  c.stack = scene / "stack" / "stack.json";
  c.out = dir_.path() / "p";
  c.model_channels = 5;
  try {
    cmd_predict(c, log_);
    FAIL();
  } catch (const ChannelMismatchError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }

  PipelineConfig u = base();
  u.out = dir_.path() / "u";
  EXPECT_THROW(cmd_groundtruth(u, log_), UsageError);
  u.stack = dir_.path() / "missing.json";
  try {
    cmd_groundtruth(u, log_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }

  // Mismatched grids in eval.
  const auto mask = read_geotiff<std::uint8_t>(scene / "gt_mask.tif");
  BinaryMask moved = mask;
  moved.transform.origin_x += 10.0;
  write_geotiff(dir_.path() / "moved.tif", moved);
  PipelineConfig e = base();
  e.preds = {dir_.path() / "moved.tif"};
  e.gts = {scene / "gt_mask.tif"};
  e.out = dir_.path() / "e";
  try {
    cmd_eval(e, log_);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kData);
  }
  e.gts.push_back(scene / "gt_mask.tif");
  EXPECT_THROW(cmd_eval(e, log_), UsageError);
}

TEST_F(PipelineTest, ConfigOverlay) {
  PipelineConfig c = apply_config_json(base(), R"({"stride": 8, "gt": "a.tif", "seed": 9})");
  EXPECT_EQ(c.stride, 8);
  EXPECT_EQ(c.window, 32);
  EXPECT_EQ(c.gts, std::vector<fs::path>{"a.tif"});
  EXPECT_TRUE(c.seed_set);
  EXPECT_THROW(apply_config_json(base(), R"({"strid": 8})"), UsageError);
  EXPECT_THROW(apply_config_json(base(), R"({"stride": "x"})"), UsageError);
  EXPECT_THROW(apply_config_json(base(), "{"), UsageError);
}

TEST_F(PipelineTest, OutputLockIsExclusive) {
  OutputLock a(dir_.path() / "locked");
  EXPECT_THROW(OutputLock b(dir_.path() / "locked"), IoError);
}

TEST_F(PipelineTest, ExperimentIsDeterministicAndBounded) {
  write_small_spec(dir_.path() / "spec.json");
  PipelineConfig c = base();
  c.spec = dir_.path() / "spec.json";
  c.shuffle = {false, true};
  c.seed = 17;
  c.threads = 4;
  c.out = dir_.path() / "run1";
  cmd_experiment(c, log_);
  c.threads = 1;
  c.out = dir_.path() / "run2";
  cmd_experiment(c, log_);
  const auto a = testing::tree_contents(dir_.path() / "run1");
  const auto b = testing::tree_contents(dir_.path() / "run2");
  EXPECT_EQ(a, b);
  ASSERT_TRUE(a.count("results.csv"));
  ASSERT_TRUE(a.count("T15_shuffled/probability.tif"));

  // Shuffling does not change a temporal-mean detector.
  EXPECT_EQ(a.at("T05_ordered/pred_mask.tif"), a.at("T05_shuffled/pred_mask.tif"));

  std::istringstream csv(a.at("results.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("T,shuffle,", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 8);

  c.t_list = {1, 16};
  c.out = dir_.path() / "run3";
  EXPECT_THROW(cmd_experiment(c, log_), UsageError);
}

}  // namespace
}  // namespace ows
