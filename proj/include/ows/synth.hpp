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
#include <string>
#include <vector>

#include "ows/dataset.hpp"
#include "ows/instances.hpp"
#include "ows/raster.hpp"

namespace ows {

// Synthetic scene: gaussian dB sea clutter, static bright turbines, and ships that show
// up in only a few frames. Defaults keep the 0 dB threshold more than 5 sigma away from
// the sea mean.
struct SyntheticSceneSpec {
  long width = 256;
  long height = 256;
  long frames = 15;
  long n_turbines = 12;
  float turbine_db = 5.0f;
  long turbine_radius_px = 1;
  float sea_mean_db = -15.0f;
  float noise_sigma_db = 3.0f;
  long n_ships = 6;
  float ship_db = 5.0f;
  long ship_frames_each = 1;
  std::uint64_t seed = 42;

  // Georeferencing of the generated grid.
  double pixel_size = 10.0;
  double origin_x = 500000.0;
  double origin_y = 5900000.0;
  std::string crs = "EPSG:32631";
  std::string start_date = "2022-08-14";
  long revisit_days = 12;
  // Turbine centers are tagged zone_00.. by vertical strips for location-based splits.
  long n_zones = 10;
};

struct ShipSighting {
  long frame = 0;
  long row = 0;
  long col = 0;
};

struct SyntheticScene {
  SarStack stack;
  BinaryMask gt_mask;
  LabeledMask gt_labeled;
  std::vector<ShipSighting> ship_log;
  std::vector<CenterPoint> turbine_centers;
};

// Throws PlacementError when the separation constraint cannot be met and UsageError for
// an inconsistent spec.
SyntheticScene generate(const SyntheticSceneSpec& spec);

// One-frame stack of frame `frame_index` (BoundsError outside [0, T)).
SarStack degrade_to_single_frame(const SyntheticScene& scene, long frame_index);

// Frames whose index appears in the ship log.
std::vector<long> ship_frames(const SyntheticScene& scene);

SyntheticSceneSpec parse_scene_spec(const std::string& json_text);
std::string scene_spec_to_json(const SyntheticSceneSpec& spec);

// The zone -> split table written next to a scene: first 60% of zones train, next 20% val,
// remainder test.
SplitAssignment default_zone_splits(long n_zones);

// Writes stack/ (manifest + frames), gt_mask.tif, gt_labels.tif, turbines.geojson,
// splits.json, ship_log.json and spec.json under `dir`.
void write_scene(const SyntheticScene& scene, const SyntheticSceneSpec& spec,
                 const std::filesystem::path& dir);

}  // namespace ows
