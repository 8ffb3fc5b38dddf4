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

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ows {

// Row-major dense 2-D array; row index = image row (southward).
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// North-up affine georeferencing:
//   map_x = origin_x + col * pixel_w
//   map_y = origin_y - row * pixel_h
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_w = 1.0;
  double pixel_h = 1.0;
  std::string crs;

  bool operator==(const GeoTransform&) const = default;
};

inline constexpr double kGridTolerance = 1e-6;

// Component-wise comparison within `tol` map units; CRS strings must match.
bool same_grid(const GeoTransform& a, const GeoTransform& b, double tol = kGridTolerance);

struct MapPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PixelIndex {
  long row = 0;
  long col = 0;
  bool operator==(const PixelIndex&) const = default;
};

MapPoint pixel_to_map(const GeoTransform& t, double row, double col);
// Cell containing the map point (floor), exact inverse of pixel_to_map on cell corners.
PixelIndex map_to_pixel(const GeoTransform& t, const MapPoint& p);

// A georeferenced single-band grid. `nodata` marks missing cells; NaN is always missing
// for floating point scalars.
template <typename Scalar>
struct GeoRaster {
  Grid<Scalar> values;
  GeoTransform transform;
  std::optional<Scalar> nodata;

  GeoRaster() = default;
  GeoRaster(Grid<Scalar> v, GeoTransform t, std::optional<Scalar> nd = std::nullopt)
      : values(std::move(v)), transform(std::move(t)), nodata(nd) {}

  Eigen::Index width() const { return values.cols(); }
  Eigen::Index height() const { return values.rows(); }

  bool is_nodata(Scalar v) const {
    if constexpr (std::is_floating_point_v<Scalar>) {
      if (std::isnan(v)) return true;
      if (nodata && std::isnan(*nodata)) return false;
    }
    return nodata && v == *nodata;
  }
  bool valid(Eigen::Index r, Eigen::Index c) const { return !is_nodata(values(r, c)); }
};

// dB backscatter or [0,1] probability raster.
using Raster = GeoRaster<float>;
// 0/1 mask; an optional nodata value marks cells excluded from evaluation.
using BinaryMask = GeoRaster<std::uint8_t>;

template <typename A, typename B>
bool same_shape(const GeoRaster<A>& a, const GeoRaster<B>& b) {
  return a.width() == b.width() && a.height() == b.height();
}

using Date = std::chrono::sys_days;

// Strict YYYY-MM-DD; returns nullopt on malformed or impossible dates.
std::optional<Date> parse_iso_date(const std::string& text);
std::string format_iso_date(Date d);

// T co-registered frames with strictly increasing acquisition dates.
class SarStack {
 public:
  // Throws GridMismatchError on misaligned frames, ManifestParseError on
  // unsorted/duplicate dates or an empty frame list.
  SarStack(std::vector<Raster> frames, std::vector<Date> dates);

  const std::vector<Raster>& frames() const { return frames_; }
  const std::vector<Date>& dates() const { return dates_; }
  std::size_t size() const { return frames_.size(); }
  Eigen::Index width() const { return frames_.front().width(); }
  Eigen::Index height() const { return frames_.front().height(); }
  const GeoTransform& transform() const { return frames_.front().transform; }

 private:
  std::vector<Raster> frames_;
  std::vector<Date> dates_;
};

// The n most recent frames, order preserved. BoundsError unless 1 <= n <= T.
SarStack subset_recent(const SarStack& stack, long n);

// Frames re-ordered so that output channel k is input frame order[k]; dates stay
// attached to channel positions. Used for channel-order experiments on whole scenes.
std::vector<Raster> permuted_frames(const SarStack& stack, const std::vector<int>& order);

}  // namespace ows
