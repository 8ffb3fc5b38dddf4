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

// Independent reference implementations used only by tests. None of these call into
// the library code paths they check.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ows/raster.hpp"

namespace ows::testing {

inline GeoTransform unit_grid(double pixel = 10.0) { return {0.0, 0.0, pixel, pixel, "EPSG:32631"}; }

inline BinaryMask random_mask(std::mt19937_64& gen, long h, long w, double density) {
  std::bernoulli_distribution fg(density);
  BinaryMask m(Grid<std::uint8_t>::Zero(h, w), unit_grid());
  for (long r = 0; r < h; ++r)
    for (long c = 0; c < w; ++c) m.values(r, c) = fg(gen) ? 1 : 0;
  return m;
}

inline BinaryMask mask_from_rows(const std::vector<std::vector<int>>& rows) {
  BinaryMask m(Grid<std::uint8_t>::Zero(static_cast<long>(rows.size()),
                                        static_cast<long>(rows.front().size())),
               unit_grid());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.values(r, c) = rows[r][c] ? 1 : 0;
  return m;
}

// Stack-based flood fill; returns one pixel set per component, in order of the first
// pixel met in a raster scan.
inline std::vector<std::set<std::pair<long, long>>> flood_fill_components(const BinaryMask& m,
                                                                          int connectivity) {
  const long h = m.height(), w = m.width();
  std::vector<std::vector<bool>> seen(h, std::vector<bool>(w, false));
  std::vector<std::set<std::pair<long, long>>> comps;
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      if (!m.values(r, c) || seen[r][c]) continue;
      std::set<std::pair<long, long>> comp;
      std::vector<std::pair<long, long>> todo{{r, c}};
      seen[r][c] = true;
      while (!todo.empty()) {
        auto [y, x] = todo.back();
        todo.pop_back();
        comp.insert({y, x});
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            if (connectivity == 4 && dy != 0 && dx != 0) continue;
            const long ny = y + dy, nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
            if (!m.values(ny, nx) || seen[ny][nx]) continue;
            seen[ny][nx] = true;
            todo.push_back({ny, nx});
          }
      }
      comps.push_back(std::move(comp));
    }
  }
  return comps;
}

struct NaiveConfusion {
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
};

inline NaiveConfusion naive_confusion(const BinaryMask& pred, const BinaryMask& gt) {
  NaiveConfusion c;
  for (long r = 0; r < gt.height(); ++r)
    for (long col = 0; col < gt.width(); ++col) {
      const int p = pred.values(r, col), g = gt.values(r, col);
      if (p == 1 && g == 1) c.tp++;
      if (p == 0 && g == 0) c.tn++;
      if (p == 1 && g == 0) c.fp++;
      if (p == 0 && g == 1) c.fn++;
    }
  return c;
}

// Random stack with a random nodata sprinkle (NaN) and values in [-30, 10] dB.
inline SarStack random_stack(std::mt19937_64& gen, long h, long w, long t, double nodata_p = 0.0) {
  std::uniform_real_distribution<float> v(-30.0f, 10.0f);
  std::bernoulli_distribution missing(nodata_p);
  std::vector<Raster> frames;
  std::vector<Date> dates;
  const Date start = *parse_iso_date("2022-08-14");
  for (long f = 0; f < t; ++f) {
    Grid<float> g(h, w);
    for (long i = 0; i < g.size(); ++i)
      g.data()[i] = missing(gen) ? std::numeric_limits<float>::quiet_NaN() : v(gen);
    frames.emplace_back(std::move(g), unit_grid(), std::numeric_limits<float>::quiet_NaN());
    dates.push_back(start + std::chrono::days(12 * f));
  }
  return SarStack(std::move(frames), std::move(dates));
}

inline bool bit_identical(const Grid<float>& a, const Grid<float>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(float) * a.size()) == 0;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents for every regular file below `root`.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out[std::filesystem::relative(e.path(), root).string()] = read_bytes(e.path());
  return out;
}

}  // namespace ows::testing
