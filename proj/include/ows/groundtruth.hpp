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

#include <span>

#include "ows/raster.hpp"

namespace ows {

inline constexpr float kDefaultThresholdDb = 0.0f;
inline constexpr long kDefaultMinAreaPx = 2;

// Mean of the valid values in `values` (nodata already removed by the caller) computed
// in an order-independent way: sorted ascending, summed in double. Returns NaN if empty.
float order_independent_mean(std::span<float> values);

// Per-pixel temporal mean in dB over the frames where the pixel is valid. Output nodata
// (NaN) iff the pixel is missing in every frame. Bit-identical under frame permutation.
Raster composite_mean(std::span<const Raster> frames);
Raster composite_mean(const SarStack& stack);

// 1 iff value > threshold_db (strict); nodata -> 0.
BinaryMask threshold_mask(const Raster& composite, float threshold_db = kDefaultThresholdDb);

// Drops 8-connected foreground components smaller than min_area_px pixels.
BinaryMask clean_mask(const BinaryMask& mask, long min_area_px = kDefaultMinAreaPx);

}  // namespace ows
