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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ows/instances.hpp"
#include "ows/raster.hpp"

namespace ows {

enum class Split { kTrain, kVal, kTest };

const char* to_string(Split s);
std::optional<Split> parse_split(const std::string& s);

struct CenterPoint {
  double map_x = 0.0;
  double map_y = 0.0;
  std::string location_id;
};

// One training unit: T x size x size image, co-located size x size mask.
// permutation[k] is the original frame index now stored in channel k.
struct PatchSample {
  std::vector<Grid<float>> image;
  Grid<std::uint8_t> mask;
  CenterPoint center;
  std::optional<Split> split;
  std::vector<int> permutation;
  long row0 = 0;  // window origin in the source scene
  long col0 = 0;
  GeoTransform transform;  // georeferencing of the window itself
  std::vector<Date> dates;  // acquisition dates in original frame order
  std::optional<float> nodata;

  long frames() const { return static_cast<long>(image.size()); }
};

using SplitAssignment = std::map<std::string, Split>;

struct SplitShare {
  std::size_t n_patches = 0;
  double fraction = 0.0;
};
using SplitSummary = std::map<Split, SplitShare>;

inline constexpr long kDefaultPatchSize = 128;

// Windows of patch_size centered on each center's containing pixel (origin = pixel -
// size/2). Without clamping an out-of-raster window throws OutOfBoundsError; with
// clamping it is shifted inward.
std::vector<PatchSample> extract_patches(const SarStack& stack, const BinaryMask& mask,
                                         const std::vector<CenterPoint>& centers,
                                         long patch_size = kDefaultPatchSize, bool clamp = false);

// Tags each sample with its location's split. UnknownLocationError for unmapped ids.
SplitSummary assign_splits(std::vector<PatchSample>& samples, const SplitAssignment& assignment);

// Per-sample seed: a mix of (global seed, sample index, epoch).
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t sample_index,
                          std::uint64_t epoch);

// Uniform permutation of 0..n-1: Fisher-Yates driven by std::mt19937_64(seed), each draw
// j in [0, i] taken by rejection sampling on the raw 64-bit output so the sequence is
// identical on every platform.
std::vector<int> random_permutation(int n, std::uint64_t seed);

// Channel k of the result is channel perm[k] of the input; the mask is untouched.
PatchSample permute_channels(const PatchSample& sample, const std::vector<int>& perm);
PatchSample shuffle_temporal(const PatchSample& sample, std::uint64_t seed);
PatchSample shuffle_for_epoch(const PatchSample& sample, std::uint64_t global_seed,
                              std::uint64_t sample_index, std::uint64_t epoch);

// One seeded shuffle per sample (epoch 0 of the derivation); identical for every run
// that uses the same seed.
std::vector<PatchSample> fixed_eval_shuffle(const std::vector<PatchSample>& samples,
                                            std::uint64_t seed);

// GeoJSON FeatureCollection of Points with a string `location_id` property.
std::vector<CenterPoint> read_centers(const std::filesystem::path& path);
std::string centers_to_geojson(const std::vector<CenterPoint>& centers, const std::string& crs);

// {"<location_id>": "train|val|test"}
SplitAssignment read_split_file(const std::filesystem::path& path);
std::string split_summary_json(const SplitSummary& summary);

// One directory per sample: image.tif (T-band float32), mask.tif (uint8), meta.json.
void write_patch_dataset(const std::vector<PatchSample>& samples,
                         const std::filesystem::path& out_dir);
std::vector<PatchSample> read_patch_dataset(const std::filesystem::path& dir);

struct CocoImage {
  std::string file_name;
  LabeledMask instances;
};

// COCO instance JSON: polygon segmentation in pixel coordinates (x = column, y = row,
// pixel corners), bbox [x, y, w, h], area = pixel count, category 1 = "wind_plant".
// Hole rings are emitted as additional polygons of the same annotation; even-odd filling
// of all polygons reproduces the instance exactly.
std::string coco_json(const std::vector<CocoImage>& images);
void export_coco(const std::vector<CocoImage>& images, const std::filesystem::path& out_path);

}  // namespace ows
