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

// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ows/dataset.hpp"
#include "ows/errors.hpp"
#include "ows/eval.hpp"
#include "ows/groundtruth.hpp"
#include "ows/inference.hpp"
#include "ows/instances.hpp"
#include "ows/pipeline.hpp"
#include "ows/synth.hpp"
#include "oracles.hpp"

#ifndef OWS_TEST_DATA_DIR
#define OWS_TEST_DATA_DIR "tests/data"
#endif

namespace ows {
namespace {

namespace fs = std::filesystem;

// Collects the first failure message of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }

 private:
  std::string failure_;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

void object_quality_counts(Check& c) {
  struct Row {
    ObjectCounts counts;
    double oq, correctness, completeness;
  };
  // The single-image row prints OQ 0.954; 296 / (296 + 14 + 1) = 0.9518, checked exactly.
  const Row rows[] = {{{296, 14, 1}, 0.952, 0.955, 0.997},
                      {{297, 2, 0}, 0.993, 0.993, 1.000},
                      {{297, 1, 0}, 0.997, 0.997, 1.000}};
  for (const Row& r : rows) {
    const ObjectMetrics m = object_metrics(r.counts);
    const double tp = r.counts.tp, fp = r.counts.fp, fn = r.counts.fn;
    c.expect(m.overall_quality == tp / (tp + fp + fn), "OQ not exact");
    c.expect(m.correctness == tp / (tp + fp), "correctness not exact");
    c.expect(m.completeness == tp / (tp + fn), "completeness not exact");
    c.expect(std::abs(m.overall_quality - r.oq) <= 5e-4, fmt("OQ %.4f vs %.3f", m.overall_quality, r.oq));
    c.expect(std::abs(m.correctness - r.correctness) <= 5e-4, fmt("correctness %.4f", m.correctness));
    c.expect(std::abs(m.completeness - r.completeness) <= 5e-4, fmt("completeness %.4f", m.completeness));
  }
}

void segmentation_score_consistency(Check& c) {
  std::ifstream in(fs::path(OWS_TEST_DATA_DIR) / "segmentation_results.csv");
  c.expect(static_cast<bool>(in), "fixture missing");
  std::string line;
  bool header = true;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (std::exchange(header, false)) continue;
    std::istringstream ss(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) {
      c.expect(false, "bad fixture row: " + line);
      continue;
    }
    const double p = std::stod(f[3]), r = std::stod(f[4]), fs_printed = std::stod(f[5]),
                 iou_printed = std::stod(f[6]);
    const double fscore = 100.0 * f_measure(p / 100.0, r / 100.0);
    const double iou = 100.0 * iou_from_fscore(fs_printed / 100.0);
    c.expect(std::abs(fscore - fs_printed) <= 0.02, f[0] + " " + f[1] + fmt(": F %.3f vs %.2f", fscore, fs_printed));
    c.expect(std::abs(iou - iou_printed) <= 0.02, f[0] + " " + f[1] + fmt(": IoU %.3f vs %.2f", iou, iou_printed));
    ++rows;
  }
  c.expect(rows == 20, "expected 20 rows, read " + std::to_string(rows));
}

void synthetic_trend(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticSceneSpec spec;
    spec.seed = seed;
    const SyntheticScene scene = generate(spec);
    c.expect(spec.n_turbines >= 10 && static_cast<long>(scene.ship_log.size()) >= 5, "scene too small");
    const StitchConfig sc{128, 64, 0.5f, 4};
    const std::string tag = "seed " + std::to_string(seed);
    for (long t : {15L, 10L, 5L}) {
      const SarStack sub = subset_recent(scene.stack, t);
      const StitchResult r = stitch_predict(sub, BaselineTemporalSegmenter(0.0f, t), sc);
      const ObjectMetrics m = object_metrics(
          match_objects(connected_components(r.mask), scene.gt_labeled).counts);
      c.expect(m.overall_quality == 1.0 && m.correctness == 1.0 && m.completeness == 1.0,
               tag + " T=" + std::to_string(t) + fmt(": OQ %.4f", m.overall_quality));
    }
    const auto frames = ship_frames(scene);
    c.expect(!frames.empty(), tag + ": no ship frame");
    if (frames.empty()) continue;
    const SarStack one = degrade_to_single_frame(scene, frames.front());
    const StitchResult r = stitch_predict(one, BaselineTemporalSegmenter(0.0f, 1), sc);
    const ObjectCounts counts =
        match_objects(connected_components(r.mask), scene.gt_labeled).counts;
    c.expect(counts.fp >= 1, tag + ": no false positive on a ship frame");
    c.expect(object_metrics(counts).completeness >= 0.99, tag + ": completeness dropped");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 60.0, fmt("took %.1f s", secs));
}

void permutation_invariance(Check& c) {
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<long> frames(1, 15);
  for (int i = 0; i < 100; ++i) {
    const long t = frames(gen);
    const SarStack stack = testing::random_stack(gen, 40, 36, t, 0.1);
    const auto perm = random_permutation(static_cast<int>(t), derive_seed(7, i, 0));
    const std::vector<Raster> shuffled = permuted_frames(stack, perm);
    const Raster a = composite_mean(stack);
    const Raster b = composite_mean(shuffled);
    c.expect(testing::bit_identical(a.values, b.values), "composite differs, stack " + std::to_string(i));

    const BaselineTemporalSegmenter seg(-10.0f, t);
    const StitchConfig sc{16, 8, 0.5f, 2};
    const StitchResult pa = stitch_predict(stack, seg, sc);
    const StitchResult pb = stitch_predict(shuffled, seg, sc);
    c.expect(testing::bit_identical(pa.probability.values, pb.probability.values),
             "pipeline output differs, stack " + std::to_string(i));
    const LabeledMask la = connected_components(pa.mask), lb = connected_components(pb.mask);
    c.expect((la.labels.values == lb.labels.values).all(), "instances differ");

    const BinaryMask gt = threshold_mask(a, -10.0f);
    const auto patches = extract_patches(stack, gt, {{180.0, -200.0, "x"}}, 16);
    const PatchSample s = shuffle_temporal(patches[0], derive_seed(3, i, 0));
    c.expect((s.mask == patches[0].mask).all(), "shuffle changed the mask");
  }
}

void oracle_equivalence(Check& c) {
  std::mt19937_64 gen(2002);
  for (int i = 0; i < 500; ++i) {
    const BinaryMask p = testing::random_mask(gen, 16, 16, 0.35);
    const BinaryMask g = testing::random_mask(gen, 16, 16, 0.35);
    const auto n = testing::naive_confusion(p, g);
    const PixelConfusion got = pixel_confusion(p, g);
    c.expect(got == PixelConfusion{n.tp, n.tn, n.fp, n.fn}, "confusion mismatch");
    const PixelMetrics m = pixel_metrics(got);
    const double tp = n.tp, fp = n.fp, fn = n.fn, tn = n.tn;
    if (n.tp + n.fp > 0 && n.tp + n.fn > 0) {
      c.expect(m.precision == tp / (tp + fp), "precision mismatch");
      c.expect(m.recall == tp / (tp + fn), "recall mismatch");
    }
    if (n.tp + n.fp + n.fn > 0) c.expect(m.iou == tp / (tp + fp + fn), "IoU mismatch");
    c.expect(m.oa == (tp + tn) / (tp + tn + fp + fn), "OA mismatch");
  }
  std::uniform_int_distribution<long> side(1, 32);
  std::uniform_real_distribution<double> density(0.1, 0.7);
  for (int i = 0; i < 200; ++i) {
    const BinaryMask m = testing::random_mask(gen, side(gen), side(gen), density(gen));
    for (Connectivity conn : {Connectivity::kFour, Connectivity::kEight}) {
      const LabeledMask l = connected_components(m, conn);
      const auto comps = testing::flood_fill_components(m, static_cast<int>(conn));
      c.expect(l.n_instances == static_cast<int>(comps.size()), "component count mismatch");
      for (std::size_t k = 0; k < comps.size() && k < static_cast<std::size_t>(l.n_instances); ++k)
        for (const auto& [r, col] : comps[k])
          c.expect(l.labels.values(r, col) == static_cast<int>(k) + 1, "component labels mismatch");
      const LabeledMask back = rasterize(polygonize(l), l.transform(), m.width(), m.height(), conn);
      c.expect((back.labels.values == l.labels.values).all(), "polygon roundtrip mismatch");
      c.expect(back.n_instances == l.n_instances, "roundtrip instance count");
    }
  }
}

void matching_uniqueness(Check& c) {
  std::mt19937_64 gen(3003);
  std::uniform_real_distribution<double> density(0.1, 0.5);
  for (int i = 0; i < 200; ++i) {
    const BinaryMask a = testing::random_mask(gen, 32, 32, density(gen));
    // Prediction: the reference with a few flipped pixels, so many pairs overlap.
    BinaryMask b = a;
    std::bernoulli_distribution flip(0.15);
    for (Eigen::Index k = 0; k < b.values.size(); ++k)
      if (flip(gen)) b.values.data()[k] ^= 1;
    const MatchResult res = match_objects(connected_components(b), connected_components(a), 0.5);
    std::set<int> gts, preds;
    for (const auto& m : res.matches) {
      c.expect(gts.insert(m.gt_id).second, "reference matched twice");
      c.expect(preds.insert(m.pred_id).second, "prediction matched twice");
      c.expect(m.iou > 0.5, "match at or below threshold");
    }
    const ObjectMetrics om = object_metrics(res.counts);
    c.expect(om.overall_quality <= std::min(om.correctness, om.completeness) + 1e-15,
             "OQ exceeds correctness or completeness");
  }
}

class ConstantSegmenter final : public Segmenter {
 public:
  std::optional<long> required_channels() const override { return std::nullopt; }
  Grid<float> predict(const Window& w) const override {
    return Grid<float>::Constant(w.rows(), w.cols(), 0.625f);
  }
};

void stitching_contracts(Check& c) {
  struct Combo {
    long h, w, window, stride;
  };
  std::vector<Combo> combos;
  for (long extent : {64L, 100L, 129L, 200L, 257L})
    for (auto [window, stride] : {std::pair{32L, 32L}, {32L, 7L}, {64L, 48L}, {64L, 1L},
                                  {50L, 25L}, {64L, 64L}})
      combos.push_back({extent, extent + 3, window, stride});
  c.expect(combos.size() == 30, "expected 30 combinations");
  for (const Combo& k : combos) {
    std::vector<Raster> frames{Raster(Grid<float>::Constant(k.h, k.w, -20.0f), testing::unit_grid())};
    const StitchResult r = stitch_predict(frames, ConstantSegmenter(), {k.window, k.stride, 0.5f, 3});
    c.expect((r.coverage > 0).all(), "uncovered pixel");
    c.expect((r.probability.values == 0.625f).all(), "constant output not uniform");
  }
  std::mt19937_64 gen(4004);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Grid<float> probs(300, 260);
  for (Eigen::Index i = 0; i < probs.size(); ++i) probs.data()[i] = u(gen);
  const PlaybackSegmenter play(Raster(probs, testing::unit_grid()));
  std::vector<Raster> frames{Raster(Grid<float>::Zero(300, 260), testing::unit_grid())};
  for (long stride : {32L, 64L, 128L}) {
    const StitchResult r = stitch_predict(frames, play, {128, stride, 0.5f, 4});
    c.expect(testing::bit_identical(r.probability.values, probs),
             "playback differs at stride " + std::to_string(stride));
  }
}

void experiment_determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() / ("ows_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream spec(root / "spec.json");
    spec << R"({"width": 160, "height": 128, "n_turbines": 10, "n_ships": 5, "seed": 11})";
  }
  std::ostringstream log;
  PipelineConfig cfg;
  cfg.spec = root / "spec.json";
  cfg.shuffle = {false, true};
  cfg.seed = 23;
  cfg.seed_set = true;
  cfg.threads = 4;
  cfg.out = root / "a";
  cmd_experiment(cfg, log);
  cfg.out = root / "b";
  cmd_experiment(cfg, log);
  const auto a = testing::tree_contents(root / "a");
  const auto b = testing::tree_contents(root / "b");
  c.expect(a.count("results.csv") == 1, "results.csv missing");
  std::size_t tiffs = 0;
  for (const auto& [name, bytes] : a) {
    tiffs += name.ends_with(".tif");
    const auto it = b.find(name);
    c.expect(it != b.end() && it->second == bytes, name + " differs between runs");
  }
  c.expect(a.size() == b.size(), "different file sets");
  c.expect(tiffs >= 16, "too few GeoTIFF outputs");
  fs::remove_all(root);
}

}  // namespace
}  // namespace ows

int main() {
  struct Criterion {
    const char* name;
    std::function<void(ows::Check&)> run;
  };
  const Criterion criteria[] = {
      {"object quality from published counts", ows::object_quality_counts},
      {"published segmentation scores are self-consistent", ows::segmentation_score_consistency},
      {"synthetic end-to-end trend", ows::synthetic_trend},
      {"permutation invariance", ows::permutation_invariance},
      {"oracle equivalence", ows::oracle_equivalence},
      {"matching uniqueness", ows::matching_uniqueness},
      {"stitching contracts", ows::stitching_contracts},
      {"experiment determinism", ows::experiment_determinism},
  };
  int failed = 0;
  for (const auto& k : criteria) {
    ows::Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      k.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (check.ok()) {
      std::printf("PASS  %s (%.0f ms)\n", k.name, ms);
    } else {
      std::printf("FAIL  %s: %s\n", k.name, check.failure().c_str());
      ++failed;
    }
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
