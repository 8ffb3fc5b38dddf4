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

#include "ows/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"
#include "ows/geotiff.hpp"
#include "ows/stack_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ows {
namespace {

// Stream tags for derive_seed so placement, ship timing and per-frame noise never share
// a generator.
constexpr std::uint64_t kPlacementStream = 0x706c6163;
constexpr std::uint64_t kShipStream = 0x73686970;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr int kMaxPlacementAttempts = 20000;

struct Site {
  long row;
  long col;
};

void validate(const SyntheticSceneSpec& s) {
  if (s.width < 1 || s.height < 1 || s.frames < 1)
    throw UsageError("scene needs positive width, height and frame count");
  if (!(s.turbine_db > 0.0f && s.sea_mean_db < 0.0f))
    throw UsageError("scene needs turbine_db > 0 > sea_mean_db");
  if (s.n_turbines < 0 || s.n_ships < 0 || s.turbine_radius_px < 0 || s.noise_sigma_db < 0)
    throw UsageError("negative count, radius or sigma in scene spec");
  if (s.ship_frames_each < 0 || s.ship_frames_each > s.frames)
    throw UsageError("ship_frames_each must lie in [0, frames]");
  if (s.n_zones < 1) throw UsageError("n_zones must be positive");
  if (!parse_iso_date(s.start_date)) throw UsageError("bad start_date " + s.start_date);
}

std::vector<Site> place_sites(const SyntheticSceneSpec& spec, long count) {
  const long r = spec.turbine_radius_px;
  if (count > 0 && (spec.height < 2 * r + 1 || spec.width < 2 * r + 1))
    throw PlacementError("scene too small for the target footprint");
  const double min_sep = 2.0 * static_cast<double>(r + 1);
  std::mt19937_64 gen(derive_seed(spec.seed, kPlacementStream, 0));
  std::uniform_int_distribution<long> row_dist(r, spec.height - 1 - r);
  std::uniform_int_distribution<long> col_dist(r, spec.width - 1 - r);
  std::vector<Site> sites;
  for (long k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const Site cand{row_dist(gen), col_dist(gen)};
      placed = std::all_of(sites.begin(), sites.end(), [&](const Site& s) {
        return std::hypot(static_cast<double>(s.row - cand.row),
                          static_cast<double>(s.col - cand.col)) > min_sep;
      });
      if (placed) sites.push_back(cand);
    }
    if (!placed)
      throw PlacementError("could not place target " + std::to_string(k) + " of " +
                           std::to_string(count) + " with separation > " +
                           std::to_string(min_sep) + " px");
  }
  return sites;
}

template <typename Fn>
void for_footprint(const Site& s, long radius, Fn&& fn) {
  for (long dr = -radius; dr <= radius; ++dr)
    for (long dc = -radius; dc <= radius; ++dc)
      if (dr * dr + dc * dc <= radius * radius) fn(s.row + dr, s.col + dc);
}

}  // namespace

SyntheticScene generate(const SyntheticSceneSpec& spec) {
  validate(spec);
  const long h = spec.height, w = spec.width, t = spec.frames;
  // Turbines and ships are placed together so no two footprints ever touch.
  const auto sites = place_sites(spec, spec.n_turbines + spec.n_ships);
  const std::vector<Site> turbines(sites.begin(), sites.begin() + spec.n_turbines);
  const std::vector<Site> ships(sites.begin() + spec.n_turbines, sites.end());

  GeoTransform transform{spec.origin_x, spec.origin_y, spec.pixel_size, spec.pixel_size,
                         spec.crs};

  std::vector<ShipSighting> ship_log;
  for (std::size_t i = 0; i < ships.size(); ++i) {
    auto order = random_permutation(static_cast<int>(t), derive_seed(spec.seed, kShipStream, i));
    order.resize(static_cast<std::size_t>(spec.ship_frames_each));
    std::sort(order.begin(), order.end());
    for (int f : order) ship_log.push_back({f, ships[i].row, ships[i].col});
  }
  std::stable_sort(ship_log.begin(), ship_log.end(),
                   [](const ShipSighting& a, const ShipSighting& b) { return a.frame < b.frame; });

  const float upper = std::min(spec.sea_mean_db + 4.0f * spec.noise_sigma_db,
                               std::nextafter(0.0f, -1.0f));
  const float lower = spec.sea_mean_db - 4.0f * spec.noise_sigma_db;
  const Date start = *parse_iso_date(spec.start_date);

  std::vector<Raster> frames;
  std::vector<Date> dates;
  for (long f = 0; f < t; ++f) {
    std::mt19937_64 gen(derive_seed(spec.seed, kNoiseStream, static_cast<std::uint64_t>(f)));
    std::normal_distribution<double> noise(spec.sea_mean_db, spec.noise_sigma_db);
    Grid<float> v(h, w);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v.data()[i] = std::clamp(static_cast<float>(noise(gen)), lower, upper);
    for (const auto& s : turbines)
      for_footprint(s, spec.turbine_radius_px, [&](long r, long c) { v(r, c) = spec.turbine_db; });
    for (const auto& sight : ship_log)
      if (sight.frame == f)
        for_footprint({sight.row, sight.col}, spec.turbine_radius_px,
                      [&](long r, long c) { v(r, c) = spec.ship_db; });
    frames.emplace_back(std::move(v), transform);
    dates.push_back(start + std::chrono::days(f * spec.revisit_days));
  }

  BinaryMask gt(Grid<std::uint8_t>::Zero(h, w), transform);
  for (const auto& s : turbines)
    for_footprint(s, spec.turbine_radius_px, [&](long r, long c) { gt.values(r, c) = 1; });

  std::vector<CenterPoint> centers;
  for (const auto& s : turbines) {
    const MapPoint p = pixel_to_map(transform, s.row + 0.5, s.col + 0.5);
    char zone[32];
    std::snprintf(zone, sizeof zone, "zone_%02ld", s.col * spec.n_zones / w);
    centers.push_back({p.x, p.y, zone});
  }

  LabeledMask labeled = connected_components(gt, Connectivity::kEight);
  return SyntheticScene{SarStack(std::move(frames), std::move(dates)), std::move(gt),
                        std::move(labeled), std::move(ship_log), std::move(centers)};
}

SarStack degrade_to_single_frame(const SyntheticScene& scene, long frame_index) {
  const long t = static_cast<long>(scene.stack.size());
  if (frame_index < 0 || frame_index >= t)
    throw BoundsError("frame index " + std::to_string(frame_index) + " outside [0, " +
                      std::to_string(t) + ")");
  return SarStack({scene.stack.frames()[frame_index]}, {scene.stack.dates()[frame_index]});
}

std::vector<long> ship_frames(const SyntheticScene& scene) {
  std::set<long> s;
  for (const auto& sight : scene.ship_log) s.insert(sight.frame);
  return {s.begin(), s.end()};
}

SyntheticSceneSpec parse_scene_spec(const std::string& json_text) {
  SyntheticSceneSpec s;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("bad scene spec: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("scene spec must be a JSON object");
  static const std::set<std::string> known = {
      "width", "height", "T", "frames", "n_turbines", "turbine_db", "turbine_radius_px",
      "sea_mean_db", "noise_sigma_db", "n_ships", "ship_db", "ship_frames_each", "seed",
      "pixel_size", "origin_x", "origin_y", "crs", "start_date", "revisit_days", "n_zones"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw FormatError("unknown scene spec key \"" + key + "\"");
  try {
    s.width = doc.value("width", s.width);
    s.height = doc.value("height", s.height);
    s.frames = doc.value("frames", doc.value("T", s.frames));
    s.n_turbines = doc.value("n_turbines", s.n_turbines);
    s.turbine_db = doc.value("turbine_db", s.turbine_db);
    s.turbine_radius_px = doc.value("turbine_radius_px", s.turbine_radius_px);
    s.sea_mean_db = doc.value("sea_mean_db", s.sea_mean_db);
    s.noise_sigma_db = doc.value("noise_sigma_db", s.noise_sigma_db);
    s.n_ships = doc.value("n_ships", s.n_ships);
    s.ship_db = doc.value("ship_db", s.ship_db);
    s.ship_frames_each = doc.value("ship_frames_each", s.ship_frames_each);
    s.seed = doc.value("seed", s.seed);
    s.pixel_size = doc.value("pixel_size", s.pixel_size);
    s.origin_x = doc.value("origin_x", s.origin_x);
    s.origin_y = doc.value("origin_y", s.origin_y);
    s.crs = doc.value("crs", s.crs);
    s.start_date = doc.value("start_date", s.start_date);
    s.revisit_days = doc.value("revisit_days", s.revisit_days);
    s.n_zones = doc.value("n_zones", s.n_zones);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad scene spec value: ") + e.what());
  }
  return s;
}

std::string scene_spec_to_json(const SyntheticSceneSpec& s) {
  json doc = {{"width", s.width},
              {"height", s.height},
              {"T", s.frames},
              {"n_turbines", s.n_turbines},
              {"turbine_db", s.turbine_db},
              {"turbine_radius_px", s.turbine_radius_px},
              {"sea_mean_db", s.sea_mean_db},
              {"noise_sigma_db", s.noise_sigma_db},
              {"n_ships", s.n_ships},
              {"ship_db", s.ship_db},
              {"ship_frames_each", s.ship_frames_each},
              {"seed", s.seed},
              {"pixel_size", s.pixel_size},
              {"origin_x", s.origin_x},
              {"origin_y", s.origin_y},
              {"crs", s.crs},
              {"start_date", s.start_date},
              {"revisit_days", s.revisit_days},
              {"n_zones", s.n_zones}};
  return doc.dump(2) + "\n";
}

SplitAssignment default_zone_splits(long n_zones) {
  SplitAssignment out;
  const long n_train = (n_zones * 6 + 9) / 10;
  const long n_val = (n_zones * 2) / 10;
  for (long z = 0; z < n_zones; ++z) {
    char zone[32];
    std::snprintf(zone, sizeof zone, "zone_%02ld", z);
    out[zone] = z < n_train ? Split::kTrain : (z < n_train + n_val ? Split::kVal : Split::kTest);
  }
  return out;
}

void write_scene(const SyntheticScene& scene, const SyntheticSceneSpec& spec, const fs::path& dir) {
  fs::create_directories(dir);
  save_stack(scene.stack, dir / "stack");
  write_geotiff(dir / "gt_mask.tif", scene.gt_mask);
  write_geotiff(dir / "gt_labels.tif", scene.gt_labeled.labels);
  write_text_atomically(dir / "turbines.geojson",
                        centers_to_geojson(scene.turbine_centers, spec.crs));
  json splits = json::object();
  for (const auto& [zone, split] : default_zone_splits(spec.n_zones)) splits[zone] = to_string(split);
  write_text_atomically(dir / "splits.json", splits.dump(2) + "\n");
  json log = json::array();
  for (const auto& s : scene.ship_log)
    log.push_back({{"frame", s.frame}, {"row", s.row}, {"col", s.col}});
  write_text_atomically(dir / "ship_log.json", log.dump(2) + "\n");
  write_text_atomically(dir / "spec.json", scene_spec_to_json(spec));
}

}  // namespace ows
