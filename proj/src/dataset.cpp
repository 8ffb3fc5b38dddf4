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

#include "ows/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"
#include "ows/geotiff.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ows {
namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

const char* to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

std::optional<Split> parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  return std::nullopt;
}

std::vector<PatchSample> extract_patches(const SarStack& stack, const BinaryMask& mask,
                                         const std::vector<CenterPoint>& centers,
                                         long patch_size, bool clamp) {
  if (!(mask.width() == stack.width() && mask.height() == stack.height()) ||
      !same_grid(mask.transform, stack.transform()))
    throw GridMismatchError("mask grid differs from the stack grid");
  if (patch_size < 1) throw BoundsError("patch size must be positive");
  const long h = stack.height(), w = stack.width();

  std::vector<PatchSample> out;
  out.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const CenterPoint& cp = centers[i];
    const PixelIndex px = map_to_pixel(stack.transform(), {cp.map_x, cp.map_y});
    if (px.row < 0 || px.col < 0 || px.row >= h || px.col >= w)
      throw OutOfBoundsError("center " + std::to_string(i) + " (" + cp.location_id +
                             ") lies outside the raster");
    long r0 = px.row - patch_size / 2;
    long c0 = px.col - patch_size / 2;
    const bool inside = r0 >= 0 && c0 >= 0 && r0 + patch_size <= h && c0 + patch_size <= w;
    if (!inside) {
      if (!clamp || patch_size > h || patch_size > w)
        throw OutOfBoundsError("center " + std::to_string(i) + " (" + cp.location_id +
                               ") window at row " + std::to_string(r0) + ", col " +
                               std::to_string(c0) + " exceeds the raster");
      r0 = std::clamp(r0, 0L, h - patch_size);
      c0 = std::clamp(c0, 0L, w - patch_size);
    }
    PatchSample s;
    for (const auto& f : stack.frames())
      s.image.push_back(f.values.block(r0, c0, patch_size, patch_size));
    s.mask = mask.values.block(r0, c0, patch_size, patch_size);
    s.center = cp;
    s.permutation.resize(stack.size());
    std::iota(s.permutation.begin(), s.permutation.end(), 0);
    s.row0 = r0;
    s.col0 = c0;
    s.transform = stack.transform();
    const MapPoint origin = pixel_to_map(stack.transform(), r0, c0);
    s.transform.origin_x = origin.x;
    s.transform.origin_y = origin.y;
    s.dates = stack.dates();
    s.nodata = stack.frames().front().nodata;
    out.push_back(std::move(s));
  }
  return out;
}

SplitSummary assign_splits(std::vector<PatchSample>& samples, const SplitAssignment& assignment) {
  for (const auto& s : samples)
    if (!assignment.contains(s.center.location_id))
      throw UnknownLocationError("no split for location \"" + s.center.location_id + "\"");
  SplitSummary summary;
  for (auto& s : samples) {
    s.split = assignment.at(s.center.location_id);
    ++summary[*s.split].n_patches;
  }
  for (auto& [split, share] : summary)
    share.fraction = static_cast<double>(share.n_patches) / static_cast<double>(samples.size());
  return summary;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t sample_index,
                          std::uint64_t epoch) {
  return mix64(mix64(mix64(global_seed) ^ sample_index) ^ epoch);
}

std::vector<int> random_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 gen(seed);
  for (int i = n - 1; i > 0; --i) {
    const std::uint64_t range = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t reject_below = (0 - range) % range;
    std::uint64_t x;
    do {
      x = gen();
    } while (x < reject_below);
    std::swap(perm[i], perm[x % range]);
  }
  return perm;
}

PatchSample permute_channels(const PatchSample& sample, const std::vector<int>& perm) {
  if (perm.size() != sample.image.size())
    throw BoundsError("permutation length differs from the channel count");
  std::vector<bool> seen(perm.size(), false);
  for (int k : perm) {
    if (k < 0 || static_cast<std::size_t>(k) >= perm.size() || seen[k])
      throw BoundsError("not a permutation");
    seen[k] = true;
  }
  PatchSample out = sample;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    out.image[k] = sample.image[perm[k]];
    out.permutation[k] = sample.permutation[perm[k]];
  }
  return out;
}

PatchSample shuffle_temporal(const PatchSample& sample, std::uint64_t seed) {
  return permute_channels(sample, random_permutation(static_cast<int>(sample.image.size()), seed));
}

PatchSample shuffle_for_epoch(const PatchSample& sample, std::uint64_t global_seed,
                              std::uint64_t sample_index, std::uint64_t epoch) {
  return shuffle_temporal(sample, derive_seed(global_seed, sample_index, epoch));
}

std::vector<PatchSample> fixed_eval_shuffle(const std::vector<PatchSample>& samples,
                                            std::uint64_t seed) {
  std::vector<PatchSample> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.push_back(shuffle_for_epoch(samples[i], seed, i, 0));
  return out;
}

std::vector<CenterPoint> read_centers(const fs::path& path) {
  const json doc = parse_json_file(path);
  std::vector<CenterPoint> out;
  try {
    for (const auto& f : doc.at("features")) {
      const auto& geom = f.at("geometry");
      if (geom.at("type") != "Point") throw FormatError(path.string() + ": non-Point feature");
      CenterPoint cp;
      cp.map_x = geom.at("coordinates").at(0).get<double>();
      cp.map_y = geom.at("coordinates").at(1).get<double>();
      cp.location_id = f.at("properties").at("location_id").get<std::string>();
      if (cp.location_id.empty()) throw FormatError(path.string() + ": empty location_id");
      out.push_back(std::move(cp));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

std::string centers_to_geojson(const std::vector<CenterPoint>& centers, const std::string& crs) {
  json features = json::array();
  for (const auto& c : centers)
    features.push_back({{"type", "Feature"},
                        {"properties", {{"location_id", c.location_id}}},
                        {"geometry", {{"type", "Point"}, {"coordinates", {c.map_x, c.map_y}}}}});
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  if (!crs.empty()) doc["crs"] = {{"type", "name"}, {"properties", {{"name", crs}}}};
  return doc.dump(1) + "\n";
}

SplitAssignment read_split_file(const fs::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_object()) throw FormatError(path.string() + ": expected an object");
  SplitAssignment out;
  for (const auto& [loc, value] : doc.items()) {
    const auto split = value.is_string() ? parse_split(value.get<std::string>()) : std::nullopt;
    if (!split) throw FormatError(path.string() + ": bad split for \"" + loc + "\"");
    out[loc] = *split;
  }
  return out;
}

std::string split_summary_json(const SplitSummary& summary) {
  json doc = json::object();
  for (const auto& [split, share] : summary)
    doc[to_string(split)] = {{"n_patches", share.n_patches}, {"fraction", share.fraction}};
  return doc.dump(2) + "\n";
}

void write_patch_dataset(const std::vector<PatchSample>& samples, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json index = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const PatchSample& s = samples[i];
    char name[32];
    std::snprintf(name, sizeof name, "sample_%05zu", i);
    const fs::path dir = out_dir / name;
    fs::create_directories(dir);
    write_geotiff_bands(dir / "image.tif", s.image, s.transform, s.nodata);
    write_geotiff(dir / "mask.tif", BinaryMask(s.mask, s.transform));
    json dates = json::array();
    for (Date d : s.dates) dates.push_back(format_iso_date(d));
    json meta = {{"location_id", s.center.location_id},
                 {"center", {s.center.map_x, s.center.map_y}},
                 {"split", s.split ? json(to_string(*s.split)) : json(nullptr)},
                 {"permutation", s.permutation},
                 {"row0", s.row0},
                 {"col0", s.col0},
                 {"frames", s.frames()},
                 {"patch_size", s.mask.rows()},
                 {"dates", dates}};
    write_text_atomically(dir / "meta.json", meta.dump(2) + "\n");
    index.push_back(name);
  }
  write_text_atomically(out_dir / "index.json", json{{"samples", index}}.dump(2) + "\n");
}

std::vector<PatchSample> read_patch_dataset(const fs::path& dir) {
  const json index = parse_json_file(dir / "index.json");
  std::vector<PatchSample> out;
  try {
    for (const auto& name : index.at("samples")) {
      const fs::path sdir = dir / name.get<std::string>();
      const json meta = parse_json_file(sdir / "meta.json");
      PatchSample s;
      BandSet bands = read_geotiff_bands(sdir / "image.tif");
      s.image = std::move(bands.bands);
      s.transform = bands.transform;
      s.nodata = bands.nodata;
      s.mask = read_geotiff<std::uint8_t>(sdir / "mask.tif").values;
      s.center = {meta.at("center").at(0).get<double>(), meta.at("center").at(1).get<double>(),
                  meta.at("location_id").get<std::string>()};
      if (!meta.at("split").is_null()) s.split = parse_split(meta.at("split").get<std::string>());
      s.permutation = meta.at("permutation").get<std::vector<int>>();
      s.row0 = meta.at("row0").get<long>();
      s.col0 = meta.at("col0").get<long>();
      for (const auto& d : meta.at("dates")) {
        const auto date = parse_iso_date(d.get<std::string>());
        if (!date) throw FormatError(sdir.string() + ": bad date");
        s.dates.push_back(*date);
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw FormatError(dir.string() + ": " + e.what());
  }
  return out;
}

std::string coco_json(const std::vector<CocoImage>& images) {
  json jimages = json::array();
  json annotations = json::array();
  long ann_id = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const CocoImage& img = images[i];
    const long image_id = static_cast<long>(i) + 1;
    jimages.push_back({{"id", image_id},
                       {"file_name", img.file_name},
                       {"width", img.instances.width()},
                       {"height", img.instances.height()}});
    for (const auto& poly : trace_boundaries(img.instances)) {
      json segmentation = json::array();
      for (const auto& ring : poly.rings) {
        json flat = json::array();
        for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
          flat.push_back(ring[k].x);
          flat.push_back(ring[k].y);
        }
        segmentation.push_back(std::move(flat));
      }
      const auto& ext = poly.rings.front();
      long x0 = ext.front().x, x1 = x0;
      long y0 = ext.front().y, y1 = y0;
      for (const auto& v : ext) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
      }
      annotations.push_back({{"id", ++ann_id},
                             {"image_id", image_id},
                             {"category_id", 1},
                             {"segmentation", segmentation},
                             {"area", poly.pixel_area},
                             {"bbox", {x0, y0, x1 - x0, y1 - y0}},
                             {"iscrowd", 0}});
    }
  }
  json doc = {{"images", jimages},
              {"annotations", annotations},
              {"categories", json::array({{{"id", 1}, {"name", "wind_plant"},
                                           {"supercategory", "offshore"}}})}};
  return doc.dump() + "\n";
}

void export_coco(const std::vector<CocoImage>& images, const fs::path& out_path) {
  write_text_atomically(out_path, coco_json(images));
}

}  // namespace ows
