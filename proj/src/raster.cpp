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

#include "ows/raster.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "ows/errors.hpp"

namespace ows {

bool same_grid(const GeoTransform& a, const GeoTransform& b, double tol) {
  return std::abs(a.origin_x - b.origin_x) <= tol && std::abs(a.origin_y - b.origin_y) <= tol &&
         std::abs(a.pixel_w - b.pixel_w) <= tol && std::abs(a.pixel_h - b.pixel_h) <= tol &&
         a.crs == b.crs;
}

MapPoint pixel_to_map(const GeoTransform& t, double row, double col) {
  return {t.origin_x + col * t.pixel_w, t.origin_y - row * t.pixel_h};
}

PixelIndex map_to_pixel(const GeoTransform& t, const MapPoint& p) {
  const double col = (p.x - t.origin_x) / t.pixel_w;
  const double row = (t.origin_y - p.y) / t.pixel_h;
  // Snap values within float noise of a cell edge onto it before flooring.
  auto snap_floor = [](double v) {
    const double r = std::round(v);
    return static_cast<long>(std::abs(v - r) < 1e-9 ? r : std::floor(v));
  };
  return {snap_floor(row), snap_floor(col)};
}

std::optional<Date> parse_iso_date(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse = [&](std::size_t pos, std::size_t len, auto& out) {
    const char* first = text.data() + pos;
    auto res = std::from_chars(first, first + len, out);
    return res.ec == std::errc{} && res.ptr == first + len;
  };
  if (!parse(0, 4, y) || !parse(5, 2, m) || !parse(8, 2, d)) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::string format_iso_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

SarStack::SarStack(std::vector<Raster> frames, std::vector<Date> dates)
    : frames_(std::move(frames)), dates_(std::move(dates)) {
  if (frames_.empty()) throw ManifestParseError("stack has no frames");
  if (frames_.size() != dates_.size())
    throw ManifestParseError("frame count and date count differ");
  const Raster& ref = frames_.front();
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    const Raster& f = frames_[i];
    if (!same_shape(f, ref) || !same_grid(f.transform, ref.transform))
      throw GridMismatchError("frame " + std::to_string(i) + " (" + format_iso_date(dates_[i]) +
                              ") is not aligned with frame 0");
    if (dates_[i] <= dates_[i - 1])
      throw ManifestParseError("frame dates must be strictly increasing at " +
                               format_iso_date(dates_[i]));
  }
}

SarStack subset_recent(const SarStack& stack, long n) {
  const long t = static_cast<long>(stack.size());
  if (n < 1 || n > t)
    throw BoundsError("requested " + std::to_string(n) + " frames from a stack of " +
                      std::to_string(t));
  std::vector<Raster> frames(stack.frames().end() - n, stack.frames().end());
  std::vector<Date> dates(stack.dates().end() - n, stack.dates().end());
  return SarStack(std::move(frames), std::move(dates));
}

std::vector<Raster> permuted_frames(const SarStack& stack, const std::vector<int>& order) {
  if (order.size() != stack.size()) throw BoundsError("permutation length differs from T");
  std::vector<Raster> out;
  out.reserve(order.size());
  for (int k : order) {
    if (k < 0 || static_cast<std::size_t>(k) >= stack.size())
      throw BoundsError("permutation index out of range");
    out.push_back(stack.frames()[k]);
  }
  return out;
}

}  // namespace ows
