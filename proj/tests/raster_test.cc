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

#include <random>

#include <gtest/gtest.h>

#include "ows/errors.hpp"
#include "oracles.hpp"

namespace ows {
namespace {

using testing::random_stack;
using testing::unit_grid;

TEST(PixelToMapTest, OriginAndAffineArithmetic) {
  const GeoTransform t{0.0, 0.0, 10.0, 10.0, ""};
  const MapPoint o = pixel_to_map(t, 0, 0);
  EXPECT_EQ(o.x, 0.0);
  EXPECT_EQ(o.y, 0.0);
  const MapPoint p = pixel_to_map(t, 2, 3);
  EXPECT_EQ(p.x, 30.0);
  EXPECT_EQ(p.y, -20.0);
}

TEST(PixelToMapTest, MapToPixelInvertsOnRandomCells) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<long> idx(0, 5000);
  const GeoTransform t{431234.5, 5912345.25, 10.0, 10.0, "EPSG:32631"};
  for (int i = 0; i < 1000; ++i) {
    const long r = idx(gen), c = idx(gen);
    EXPECT_EQ(map_to_pixel(t, pixel_to_map(t, r, c)), (PixelIndex{r, c}));
    // Any point inside the cell maps back to it.
    EXPECT_EQ(map_to_pixel(t, pixel_to_map(t, r + 0.5, c + 0.25)), (PixelIndex{r, c}));
  }
}

TEST(DateTest, ParsesStrictIsoDates) {
  ASSERT_TRUE(parse_iso_date("2023-01-29"));
  EXPECT_EQ(format_iso_date(*parse_iso_date("2023-01-29")), "2023-01-29");
  EXPECT_FALSE(parse_iso_date("2023-02-30"));
  EXPECT_FALSE(parse_iso_date("2023-1-29"));
  EXPECT_FALSE(parse_iso_date("20230129"));
}

TEST(SarStackTest, RejectsMisalignedFrames) {
  Raster a(Grid<float>::Zero(4, 4), unit_grid());
  Raster b = a;
  b.transform.origin_x += 10.0;  // one pixel
  const Date d0 = *parse_iso_date("2022-01-01");
  EXPECT_THROW(SarStack({a, b}, {d0, d0 + std::chrono::days(1)}), GridMismatchError);
  Raster c = a;
  c.transform.origin_x += 5e-7;  // inside tolerance
  EXPECT_NO_THROW(SarStack({a, c}, {d0, d0 + std::chrono::days(1)}));
  Raster d(Grid<float>::Zero(4, 5), unit_grid());
  EXPECT_THROW(SarStack({a, d}, {d0, d0 + std::chrono::days(1)}), GridMismatchError);
}

TEST(SarStackTest, RejectsUnsortedOrEmpty) {
  Raster a(Grid<float>::Zero(2, 2), unit_grid());
  const Date d0 = *parse_iso_date("2022-01-01");
  EXPECT_THROW(SarStack({a, a}, {d0, d0}), ManifestParseError);
  EXPECT_THROW(SarStack({}, {}), ManifestParseError);
}

TEST(SubsetRecentTest, TakesLatestFramesInOrder) {
  std::mt19937_64 gen(1);
  const SarStack s = random_stack(gen, 3, 3, 15);

  const SarStack all = subset_recent(s, 15);
  ASSERT_EQ(all.size(), 15u);
  EXPECT_EQ(all.dates(), s.dates());

  const SarStack last = subset_recent(s, 1);
  ASSERT_EQ(last.size(), 1u);
  EXPECT_EQ(last.dates().front(), s.dates().back());

  const SarStack five = subset_recent(s, 5);
  ASSERT_EQ(five.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(five.dates()[k], s.dates()[10 + k]);
    EXPECT_TRUE(testing::bit_identical(five.frames()[k].values, s.frames()[10 + k].values));
  }
  // Idempotent for the same n.
  EXPECT_EQ(subset_recent(five, 5).dates(), five.dates());

  EXPECT_THROW(subset_recent(s, 0), BoundsError);
  EXPECT_THROW(subset_recent(s, 16), BoundsError);
}

TEST(GridToleranceTest, SymmetricAndTransitiveWithinTolerance) {
  GeoTransform a = unit_grid(), b = a, c = a;
  b.origin_x += 4e-7;
  c.origin_x += 8e-7;
  EXPECT_EQ(same_grid(a, b), same_grid(b, a));
  EXPECT_TRUE(same_grid(a, b) && same_grid(b, c) && same_grid(a, c));
  GeoTransform d = a;
  d.crs = "EPSG:4326";
  EXPECT_FALSE(same_grid(a, d));
}

}  // namespace
}  // namespace ows
