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

#include "ows/groundtruth.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "ows/errors.hpp"
#include "ows/instances.hpp"

namespace ows {

float order_independent_mean(std::span<float> values) {
  if (values.empty()) return std::numeric_limits<float>::quiet_NaN();
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (float v : values) sum += v;
  return static_cast<float>(sum / static_cast<double>(values.size()));
}

Raster composite_mean(std::span<const Raster> frames) {
  if (frames.empty()) throw EmptyInputError("composite of an empty stack");
  const Raster& ref = frames.front();
  const Eigen::Index h = ref.height(), w = ref.width();
  for (const auto& f : frames)
    if (!same_shape(f, ref)) throw DimMismatchError("frames differ in size");

  Raster out(Grid<float>(h, w), ref.transform, std::numeric_limits<float>::quiet_NaN());
  std::vector<float> buf;
  buf.reserve(frames.size());
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      buf.clear();
      for (const auto& f : frames)
        if (f.valid(r, c)) buf.push_back(f.values(r, c));
      out.values(r, c) = order_independent_mean(buf);
    }
  }
  return out;
}

Raster composite_mean(const SarStack& stack) { return composite_mean(stack.frames()); }

BinaryMask threshold_mask(const Raster& composite, float threshold_db) {
  BinaryMask out(Grid<std::uint8_t>::Zero(composite.height(), composite.width()),
                 composite.transform);
  for (Eigen::Index r = 0; r < composite.height(); ++r)
    for (Eigen::Index c = 0; c < composite.width(); ++c)
      if (composite.valid(r, c) && composite.values(r, c) > threshold_db) out.values(r, c) = 1;
  return out;
}

BinaryMask clean_mask(const BinaryMask& mask, long min_area_px) {
  if (min_area_px <= 1) return mask;
  const LabeledMask labeled = connected_components(mask, Connectivity::kEight);
  const auto areas = instance_areas(labeled);
  BinaryMask out = mask;
  for (Eigen::Index r = 0; r < mask.height(); ++r)
    for (Eigen::Index c = 0; c < mask.width(); ++c) {
      const auto l = labeled.labels.values(r, c);
      if (l > 0 && areas[l] < min_area_px) out.values(r, c) = 0;
    }
  return out;
}

}  // namespace ows
