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

#include "ows/raster.hpp"

namespace ows {

enum class Connectivity { kFour = 4, kEight = 8 };

// Integer instance raster: 0 is background, instances are 1..n_instances, each a single
// connected component under `connectivity`.
struct LabeledMask {
  GeoRaster<std::int32_t> labels;
  int n_instances = 0;
  Connectivity connectivity = Connectivity::kEight;

  Eigen::Index width() const { return labels.width(); }
  Eigen::Index height() const { return labels.height(); }
  const GeoTransform& transform() const { return labels.transform; }
};

// Two-pass union-find labeling. Labels are numbered in first-encounter raster-scan order.
// Mask cells equal to the mask's nodata value count as background.
LabeledMask connected_components(const BinaryMask& mask,
                                 Connectivity connectivity = Connectivity::kEight);

BinaryMask foreground(const LabeledMask& labeled);

// Pixel count per label; index 0 holds the background count.
std::vector<std::int64_t> instance_areas(const LabeledMask& labeled);

// A vertex on the pixel-corner lattice: x = column edge, y = row edge.
struct LatticePoint {
  long x = 0;
  long y = 0;
  bool operator==(const LatticePoint&) const = default;
};

using LatticeRing = std::vector<LatticePoint>;  // closed: front() == back()

struct LatticePolygon {
  int instance_id = 0;
  std::vector<LatticeRing> rings;  // rings[0] exterior, then holes
  std::int64_t pixel_area = 0;
};

// Traces every instance boundary along pixel edges. Exterior rings run clockwise in
// row-down lattice space (counter-clockwise on the map), holes the other way. Collinear
// vertices are dropped and each ring starts at its top-most, then left-most vertex.
// Diagonal pinch points are walked so that rings follow the mask's connectivity: rings
// may touch themselves at a corner vertex but never cross.
std::vector<LatticePolygon> trace_boundaries(const LabeledMask& labeled);

// Twice the signed area (shoelace) in lattice units; positive for exterior rings.
std::int64_t doubled_signed_area(const LatticeRing& ring);

struct Vertex {
  double x = 0.0;
  double y = 0.0;
};

// Even-odd fill of a set of rings (x = column, y = row, pixel units) onto pixel centers.
Grid<std::uint8_t> fill_even_odd(const std::vector<std::vector<Vertex>>& rings,
                                 Eigen::Index width, Eigen::Index height);

struct InstancePolygon {
  int instance_id = 0;
  std::vector<std::vector<MapPoint>> rings;  // rings[0] exterior, then holes; all closed
  std::int64_t pixel_area = 0;
};

struct InstancePolygonSet {
  std::vector<InstancePolygon> polygons;
  std::string crs;
};

InstancePolygonSet polygonize(const LabeledMask& labeled);

// Pixel-center even-odd rasterization; exact inverse of polygonize on its own output.
// Throws ExtentError when a vertex lies outside the grid.
LabeledMask rasterize(const InstancePolygonSet& polyset, const GeoTransform& transform,
                      Eigen::Index width, Eigen::Index height,
                      Connectivity connectivity = Connectivity::kEight);

// GeoJSON FeatureCollection of Polygons with properties {instance_id, pixel_area}.
std::string to_geojson(const InstancePolygonSet& polyset);
InstancePolygonSet polygons_from_geojson(const std::string& text);
void write_geojson(const std::filesystem::path& path, const InstancePolygonSet& polyset);

}  // namespace ows
