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
#include <span>
#include <string>
#include <vector>

#include "ows/instances.hpp"
#include "ows/raster.hpp"

namespace ows {

struct PixelConfusion {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
  PixelConfusion& operator+=(const PixelConfusion& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend PixelConfusion operator+(PixelConfusion a, const PixelConfusion& b) { return a += b; }
  bool operator==(const PixelConfusion&) const = default;
};

struct PixelMetrics {
  double oa = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  double iou = 0.0;
};

struct ObjectCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  ObjectCounts& operator+=(const ObjectCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ObjectCounts&) const = default;
};

struct ObjectMetrics {
  double overall_quality = 0.0;
  double correctness = 0.0;
  double completeness = 0.0;
};

struct ObjectMatch {
  int pred_id = 0;
  int gt_id = 0;
  std::int64_t intersection = 0;
  std::int64_t union_area = 0;
  double iou = 0.0;
};

struct MatchResult {
  ObjectCounts counts;
  std::vector<ObjectMatch> matches;
};

inline constexpr double kDefaultIouThreshold = 0.5;

// Cells that are nodata in either mask are left out of all four counts.
PixelConfusion pixel_confusion(const BinaryMask& pred, const BinaryMask& gt);

// Harmonic mean of precision and recall; 0 when both are 0.
double f_measure(double precision, double recall);
// Jaccard index implied by an F-score: F / (2 - F).
double iou_from_fscore(double fscore);

// Ratios with 0/0 reported as 1 when prediction and reference foreground are both empty,
// otherwise 0.
PixelMetrics pixel_metrics(const PixelConfusion& c);

// Pixel-set IoU between instances; a pair matches iff IoU > iou_threshold. Pairs are
// accepted greedily by descending IoU (ties by pred id, then gt id) and each instance
// is used at most once; for thresholds >= 0.5 every candidate pair is already unique.
MatchResult match_objects(const LabeledMask& pred, const LabeledMask& gt,
                          double iou_threshold = kDefaultIouThreshold);

// OQ = tp/(tp+fp+fn), correctness = tp/(tp+fp), completeness = tp/(tp+fn); 0/0 -> 1.
ObjectMetrics object_metrics(const ObjectCounts& c);

// Micro-average: pools confusion counts over all pairs, then computes metrics once.
PixelConfusion pooled_confusion(std::span<const BinaryMask> preds, std::span<const BinaryMask> gts);
PixelMetrics evaluate_patchset(std::span<const BinaryMask> preds, std::span<const BinaryMask> gts);

struct EvalConfig {
  double iou_threshold = kDefaultIouThreshold;
  double binarize_at = 0.5;
  long window = 0;
  long stride = 0;
  long frames = 0;
  int connectivity = 8;
};

struct EvalReport {
  PixelConfusion confusion;
  PixelMetrics pixel;
  ObjectCounts objects;
  ObjectMetrics object;
  EvalConfig config;
};

EvalReport make_report(const PixelConfusion& confusion, const ObjectCounts& objects,
                       const EvalConfig& config);

// JSON with "pixel" and "object" blocks; metric values rounded to 6 decimals.
std::string report_to_json(const EvalReport& report);
void write_report(const std::filesystem::path& path, const EvalReport& report);

std::string csv_header();
std::string csv_row(const EvalReport& report);

}  // namespace ows
