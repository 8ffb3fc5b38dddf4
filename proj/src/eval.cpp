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

#include "ows/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"

using nlohmann::json;

namespace ows {
namespace {

double ratio(std::int64_t num, std::int64_t den, bool both_empty) {
  if (den == 0) return both_empty ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

PixelConfusion pixel_confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (!same_shape(pred, gt))
    throw DimMismatchError("prediction " + std::to_string(pred.width()) + "x" +
                           std::to_string(pred.height()) + " vs reference " +
                           std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  PixelConfusion c;
  for (Eigen::Index r = 0; r < gt.height(); ++r) {
    for (Eigen::Index col = 0; col < gt.width(); ++col) {
      if (!pred.valid(r, col) || !gt.valid(r, col)) continue;
      const bool p = pred.values(r, col) != 0;
      const bool g = gt.values(r, col) != 0;
      if (p && g)
        ++c.tp;
      else if (p)
        ++c.fp;
      else if (g)
        ++c.fn;
      else
        ++c.tn;
    }
  }
  return c;
}

double f_measure(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double iou_from_fscore(double fscore) { return fscore / (2.0 - fscore); }

PixelMetrics pixel_metrics(const PixelConfusion& c) {
  const bool both_empty = c.tp + c.fp == 0 && c.tp + c.fn == 0;
  PixelMetrics m;
  m.oa = ratio(c.tp + c.tn, c.total(), both_empty);
  m.precision = ratio(c.tp, c.tp + c.fp, both_empty);
  m.recall = ratio(c.tp, c.tp + c.fn, both_empty);
  m.fscore = both_empty ? 1.0 : f_measure(m.precision, m.recall);
  m.iou = ratio(c.tp, c.tp + c.fp + c.fn, both_empty);
  return m;
}

MatchResult match_objects(const LabeledMask& pred, const LabeledMask& gt, double iou_threshold) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw DimMismatchError("labeled masks differ in size");
  const auto pred_area = instance_areas(pred);
  const auto gt_area = instance_areas(gt);

  std::map<std::pair<int, int>, std::int64_t> overlap;
  const auto& pl = pred.labels.values;
  const auto& gl = gt.labels.values;
  for (Eigen::Index i = 0; i < pl.size(); ++i) {
    const int p = pl.data()[i], g = gl.data()[i];
    if (p > 0 && g > 0) ++overlap[{p, g}];
  }

  std::vector<ObjectMatch> candidates;
  for (const auto& [key, inter] : overlap) {
    const auto [p, g] = key;
    const std::int64_t uni = pred_area[p] + gt_area[g] - inter;
    const double iou = static_cast<double>(inter) / static_cast<double>(uni);
    if (iou > iou_threshold) candidates.push_back({p, g, inter, uni, iou});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const ObjectMatch& a, const ObjectMatch& b) { return a.iou > b.iou; });

  MatchResult res;
  std::vector<bool> pred_used(pred_area.size(), false), gt_used(gt_area.size(), false);
  for (const auto& m : candidates) {
    if (pred_used[m.pred_id] || gt_used[m.gt_id]) continue;
    pred_used[m.pred_id] = gt_used[m.gt_id] = true;
    res.matches.push_back(m);
  }
  std::sort(res.matches.begin(), res.matches.end(),
            [](const ObjectMatch& a, const ObjectMatch& b) { return a.pred_id < b.pred_id; });
  res.counts.tp = static_cast<std::int64_t>(res.matches.size());
  res.counts.fp = pred.n_instances - res.counts.tp;
  res.counts.fn = gt.n_instances - res.counts.tp;
  return res;
}

ObjectMetrics object_metrics(const ObjectCounts& c) {
  ObjectMetrics m;
  m.overall_quality = ratio(c.tp, c.tp + c.fp + c.fn, true);
  m.correctness = ratio(c.tp, c.tp + c.fp, true);
  m.completeness = ratio(c.tp, c.tp + c.fn, true);
  return m;
}

PixelConfusion pooled_confusion(std::span<const BinaryMask> preds,
                                std::span<const BinaryMask> gts) {
  if (preds.empty() && gts.empty()) throw EmptyInputError("no patches to evaluate");
  if (preds.size() != gts.size())
    throw DimMismatchError("prediction and reference lists differ in length");
  PixelConfusion total;
  for (std::size_t i = 0; i < preds.size(); ++i) total += pixel_confusion(preds[i], gts[i]);
  return total;
}

PixelMetrics evaluate_patchset(std::span<const BinaryMask> preds,
                               std::span<const BinaryMask> gts) {
  return pixel_metrics(pooled_confusion(preds, gts));
}

EvalReport make_report(const PixelConfusion& confusion, const ObjectCounts& objects,
                       const EvalConfig& config) {
  return {confusion, pixel_metrics(confusion), objects, object_metrics(objects), config};
}

std::string report_to_json(const EvalReport& r) {
  json doc = {
      {"pixel",
       {{"tp", r.confusion.tp},
        {"tn", r.confusion.tn},
        {"fp", r.confusion.fp},
        {"fn", r.confusion.fn},
        {"oa", round6(r.pixel.oa)},
        {"precision", round6(r.pixel.precision)},
        {"recall", round6(r.pixel.recall)},
        {"fscore", round6(r.pixel.fscore)},
        {"iou", round6(r.pixel.iou)}}},
      {"object",
       {{"tp", r.objects.tp},
        {"fp", r.objects.fp},
        {"fn", r.objects.fn},
        {"overall_quality", round6(r.object.overall_quality)},
        {"correctness", round6(r.object.correctness)},
        {"completeness", round6(r.object.completeness)}}},
      {"config",
       {{"iou_threshold", r.config.iou_threshold},
        {"binarize_at", r.config.binarize_at},
        {"window", r.config.window},
        {"stride", r.config.stride},
        {"frames", r.config.frames},
        {"connectivity", r.config.connectivity}}},
  };
  return doc.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
  write_text_atomically(path, report_to_json(report));
}

std::string csv_header() {
  return "pixel_tp,pixel_tn,pixel_fp,pixel_fn,oa,precision,recall,fscore,iou,"
         "object_tp,object_fp,object_fn,overall_quality,correctness,completeness";
}

std::string csv_row(const EvalReport& r) {
  std::string s;
  auto add = [&](const std::string& v) {
    if (!s.empty()) s += ',';
    s += v;
  };
  add(std::to_string(r.confusion.tp));
  add(std::to_string(r.confusion.tn));
  add(std::to_string(r.confusion.fp));
  add(std::to_string(r.confusion.fn));
  for (double v : {r.pixel.oa, r.pixel.precision, r.pixel.recall, r.pixel.fscore, r.pixel.iou})
    add(fmt6(v));
  add(std::to_string(r.objects.tp));
  add(std::to_string(r.objects.fp));
  add(std::to_string(r.objects.fn));
  for (double v : {r.object.overall_quality, r.object.correctness, r.object.completeness})
    add(fmt6(v));
  return s;
}

}  // namespace ows
