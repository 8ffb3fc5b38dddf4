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

#include <optional>
#include <span>
#include <vector>

#include "ows/raster.hpp"

namespace ows {

// A window cut from a stack: `channels` are T blocks of size h x w whose top-left cell
// sits at (row0, col0) of the full scene.
struct Window {
  Eigen::Index row0 = 0;
  Eigen::Index col0 = 0;
  std::vector<Grid<float>> channels;
  std::optional<float> nodata;

  Eigen::Index rows() const { return channels.empty() ? 0 : channels.front().rows(); }
  Eigen::Index cols() const { return channels.empty() ? 0 : channels.front().cols(); }
};

// Maps a T x h x w dB window to an h x w probability map in [0, 1].
// Implementations must be safe to call concurrently.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  // Channel count the segmenter expects, or nullopt when any T is accepted.
  virtual std::optional<long> required_channels() const = 0;
  virtual Grid<float> predict(const Window& window) const = 0;
  // Throws GridMismatchError when the segmenter cannot serve this scene grid.
  virtual void check_grid(const GeoTransform&, Eigen::Index /*width*/,
                          Eigen::Index /*height*/) const {}
};

// Hard 0/1 output: 1 iff the pixel's temporal mean exceeds threshold_db.
class BaselineTemporalSegmenter final : public Segmenter {
 public:
  explicit BaselineTemporalSegmenter(float threshold_db = 0.0f,
                                     std::optional<long> required_channels = std::nullopt)
      : threshold_db_(threshold_db), required_(required_channels) {}

  std::optional<long> required_channels() const override { return required_; }
  Grid<float> predict(const Window& window) const override;

 private:
  float threshold_db_;
  std::optional<long> required_;
};

// Serves co-located crops of a precomputed full-scene probability raster.
class PlaybackSegmenter final : public Segmenter {
 public:
  explicit PlaybackSegmenter(Raster source) : source_(std::move(source)) {}

  std::optional<long> required_channels() const override { return std::nullopt; }
  Grid<float> predict(const Window& window) const override;
  void check_grid(const GeoTransform& transform, Eigen::Index width,
                  Eigen::Index height) const override;
  const Raster& source() const { return source_; }

 private:
  Raster source_;
};

struct StitchConfig {
  long window = 128;
  long stride = 64;
  float binarize_at = 0.5f;
  int threads = 1;
};

// 0, stride, 2*stride, ... plus a final origin snapped to extent - window when the
// regular sequence falls short. BoundsError if window > extent or stride < 1.
std::vector<long> window_origins(long extent, long window, long stride);

struct StitchResult {
  Raster probability;
  BinaryMask mask;             // probability > binarize_at
  Grid<std::int32_t> coverage;  // windows contributing to each pixel
};

// Sliding-window prediction with arithmetic-mean blending of overlaps. Windows may run
// concurrently; the reduction always proceeds in origin order, so the result does not
// depend on scheduling.
StitchResult stitch_predict(std::span<const Raster> frames, const Segmenter& segmenter,
                            const StitchConfig& cfg);
StitchResult stitch_predict(const SarStack& stack, const Segmenter& segmenter,
                            const StitchConfig& cfg);

}  // namespace ows
