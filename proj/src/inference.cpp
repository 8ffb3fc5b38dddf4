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

#include "ows/inference.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "ows/errors.hpp"
#include "ows/groundtruth.hpp"

namespace ows {

Grid<float> BaselineTemporalSegmenter::predict(const Window& window) const {
  Grid<float> out = Grid<float>::Zero(window.rows(), window.cols());
  const Raster probe(Grid<float>(), {}, window.nodata);
  std::vector<float> buf;
  buf.reserve(window.channels.size());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      buf.clear();
      for (const auto& ch : window.channels)
        if (!probe.is_nodata(ch(r, c))) buf.push_back(ch(r, c));
      if (!buf.empty() && order_independent_mean(buf) > threshold_db_) out(r, c) = 1.0f;
    }
  }
  return out;
}

Grid<float> PlaybackSegmenter::predict(const Window& window) const {
  if (window.row0 < 0 || window.col0 < 0 || window.row0 + window.rows() > source_.height() ||
      window.col0 + window.cols() > source_.width())
    throw BoundsError("window outside the playback raster");
  Grid<float> out = source_.values.block(window.row0, window.col0, window.rows(), window.cols());
  if (source_.nodata)
    for (Eigen::Index i = 0; i < out.size(); ++i)
      if (source_.is_nodata(out.data()[i])) out.data()[i] = 0.0f;
  return out;
}

void PlaybackSegmenter::check_grid(const GeoTransform& transform, Eigen::Index width,
                                   Eigen::Index height) const {
  if (source_.width() != width || source_.height() != height)
    throw GridMismatchError("playback raster is " + std::to_string(source_.width()) + "x" +
                            std::to_string(source_.height()) + ", scene is " +
                            std::to_string(width) + "x" + std::to_string(height));
  const bool crs_ok = source_.transform.crs.empty() || transform.crs.empty() ||
                      source_.transform.crs == transform.crs;
  GeoTransform a = source_.transform, b = transform;
  a.crs = b.crs = "";
  if (!crs_ok || !same_grid(a, b)) throw GridMismatchError("playback raster grid differs from scene");
}

std::vector<long> window_origins(long extent, long window, long stride) {
  if (window < 1 || window > extent)
    throw BoundsError("window " + std::to_string(window) + " does not fit extent " +
                      std::to_string(extent));
  if (stride < 1 || stride > window)
    throw BoundsError("stride must lie in [1, window], got " + std::to_string(stride));
  std::vector<long> origins;
  for (long o = 0; o + window <= extent; o += stride) origins.push_back(o);
  if (origins.back() != extent - window) origins.push_back(extent - window);
  return origins;
}

StitchResult stitch_predict(std::span<const Raster> frames, const Segmenter& segmenter,
                            const StitchConfig& cfg) {
  if (frames.empty()) throw EmptyInputError("no frames to predict on");
  const Raster& ref = frames.front();
  const long t = static_cast<long>(frames.size());
  if (auto req = segmenter.required_channels(); req && *req != t)
    throw ChannelMismatchError("segmenter expects " + std::to_string(*req) +
                               " channels, stack has " + std::to_string(t));
  segmenter.check_grid(ref.transform, ref.width(), ref.height());

  const auto row_origins = window_origins(ref.height(), cfg.window, cfg.stride);
  const auto col_origins = window_origins(ref.width(), cfg.window, cfg.stride);
  const std::size_t n_windows = row_origins.size() * col_origins.size();

  std::vector<Grid<float>> preds(n_windows);
  auto run_window = [&](std::size_t i) {
    Window w;
    w.row0 = row_origins[i / col_origins.size()];
    w.col0 = col_origins[i % col_origins.size()];
    w.nodata = ref.nodata;
    w.channels.reserve(frames.size());
    for (const auto& f : frames)
      w.channels.push_back(f.values.block(w.row0, w.col0, cfg.window, cfg.window));
    Grid<float> p = segmenter.predict(w);
    if (p.rows() != cfg.window || p.cols() != cfg.window)
      throw DimMismatchError("segmenter output size differs from its input window");
    preds[i] = std::move(p);
  };

  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_windows)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_windows; ++i) run_window(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_windows && !failed; i = next++) {
          try {
            run_window(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  Grid<double> sum = Grid<double>::Zero(ref.height(), ref.width());
  Grid<std::int32_t> count = Grid<std::int32_t>::Zero(ref.height(), ref.width());
  for (std::size_t i = 0; i < n_windows; ++i) {
    const long r0 = row_origins[i / col_origins.size()];
    const long c0 = col_origins[i % col_origins.size()];
    sum.block(r0, c0, cfg.window, cfg.window) += preds[i].cast<double>();
    count.block(r0, c0, cfg.window, cfg.window) += 1;
  }

  StitchResult out;
  out.probability = Raster((sum / count.cast<double>()).cast<float>(), ref.transform);
  out.mask = BinaryMask((out.probability.values > cfg.binarize_at).cast<std::uint8_t>(),
                        ref.transform);
  out.coverage = std::move(count);
  return out;
}

StitchResult stitch_predict(const SarStack& stack, const Segmenter& segmenter,
                            const StitchConfig& cfg) {
  return stitch_predict(std::span<const Raster>(stack.frames()), segmenter, cfg);
}

}  // namespace ows
