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

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "ows/raster.hpp"

namespace ows {

// GeoTIFF I/O for north-up grids. Supported scalars: float, std::uint8_t, std::int32_t.
// Writes are atomic (temporary sibling file + rename) and byte-deterministic.
template <typename Scalar>
void write_geotiff(const std::filesystem::path& path, const GeoRaster<Scalar>& raster);

// Reads band 0. Throws MissingFileError, IoError, or FormatError when the stored
// sample type does not match Scalar.
template <typename Scalar>
GeoRaster<Scalar> read_geotiff(const std::filesystem::path& path);

// Multi-band float32, band-sequential (planar) layout.
void write_geotiff_bands(const std::filesystem::path& path, std::span<const Grid<float>> bands,
                         const GeoTransform& transform, std::optional<float> nodata = std::nullopt);

struct BandSet {
  std::vector<Grid<float>> bands;
  GeoTransform transform;
  std::optional<float> nodata;
};
BandSet read_geotiff_bands(const std::filesystem::path& path);

}  // namespace ows
