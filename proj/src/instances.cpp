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

#include "ows/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"

using nlohmann::json;

namespace ows {
namespace {

class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

// Headings on the lattice: right, down, left, up (row axis points down).
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

}  // namespace

LabeledMask connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const Eigen::Index h = mask.height(), w = mask.width();
  Grid<std::int32_t> prov = Grid<std::int32_t>::Constant(h, w, -1);
  DisjointSet sets;
  auto fg = [&](Eigen::Index r, Eigen::Index c) {
    return mask.values(r, c) != 0 && mask.valid(r, c);
  };

  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      if (!fg(r, c)) continue;
      int label = -1;
      auto join = [&](Eigen::Index rr, Eigen::Index cc) {
        if (rr < 0 || cc < 0 || cc >= w) return;
        const int n = prov(rr, cc);
        if (n < 0) return;
        if (label < 0)
          label = n;
        else
          sets.unite(label, n);
      };
      join(r, c - 1);
      join(r - 1, c);
      if (connectivity == Connectivity::kEight) {
        join(r - 1, c - 1);
        join(r - 1, c + 1);
      }
      prov(r, c) = label < 0 ? sets.make() : label;
    }
  }

  LabeledMask out;
  out.connectivity = connectivity;
  out.labels = GeoRaster<std::int32_t>(Grid<std::int32_t>::Zero(h, w), mask.transform);
  std::vector<int> canonical;
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) {
      if (prov(r, c) < 0) continue;
      const int root = sets.find(prov(r, c));
      if (static_cast<std::size_t>(root) >= canonical.size()) canonical.resize(root + 1, 0);
      if (canonical[root] == 0) canonical[root] = ++out.n_instances;
      out.labels.values(r, c) = canonical[root];
    }
  }
  return out;
}

BinaryMask foreground(const LabeledMask& labeled) {
  return BinaryMask((labeled.labels.values > 0).cast<std::uint8_t>(), labeled.transform());
}

std::vector<std::int64_t> instance_areas(const LabeledMask& labeled) {
  std::vector<std::int64_t> areas(static_cast<std::size_t>(labeled.n_instances) + 1, 0);
  const auto& v = labeled.labels.values;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto l = v.data()[i];
    if (l >= 0 && l <= labeled.n_instances) ++areas[l];
  }
  return areas;
}

std::int64_t doubled_signed_area(const LatticeRing& ring) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    acc += static_cast<std::int64_t>(ring[i].x) * ring[i + 1].y -
           static_cast<std::int64_t>(ring[i + 1].x) * ring[i].y;
  return acc;
}

std::vector<LatticePolygon> trace_boundaries(const LabeledMask& labeled) {
  const auto& lab = labeled.labels.values;
  const long h = lab.rows(), w = lab.cols();
  const bool cross_pinch = labeled.connectivity == Connectivity::kEight;

  auto cell = [&](long col, long row) -> std::int32_t {
    if (row < 0 || col < 0 || row >= h || col >= w) return 0;
    return lab(row, col);
  };
  // One flag per (vertex, heading).
  std::vector<std::uint8_t> visited(static_cast<std::size_t>((h + 1) * (w + 1) * 4), 0);
  auto edge_id = [&](long x, long y, int d) {
    return static_cast<std::size_t>((y * (w + 1) + x) * 4 + d);
  };

  std::vector<LatticePolygon> polys(static_cast<std::size_t>(labeled.n_instances));
  for (int i = 0; i < labeled.n_instances; ++i) polys[i].instance_id = i + 1;
  const auto areas = instance_areas(labeled);
  for (int i = 0; i < labeled.n_instances; ++i) polys[i].pixel_area = areas[i + 1];

  auto trace = [&](std::int32_t label, long x0, long y0, int d0) {
    LatticeRing ring;
    long x = x0, y = y0;
    int d = d0;
    do {
      visited[edge_id(x, y, d)] = 1;
      x += kDx[d];
      y += kDy[d];
      // Cells ahead-left and ahead-right of the vertex just reached.
      long al_c, al_r, ar_c, ar_r;
      switch (d) {
        case 0: ar_c = x;     ar_r = y;     al_c = x;     al_r = y - 1; break;
        case 1: ar_c = x - 1; ar_r = y;     al_c = x;     al_r = y;     break;
        case 2: ar_c = x - 1; ar_r = y - 1; al_c = x - 1; al_r = y;     break;
        default: ar_c = x;    ar_r = y - 1; al_c = x - 1; al_r = y - 1; break;
      }
      const bool left_in = cell(al_c, al_r) == label;
      const bool right_in = cell(ar_c, ar_r) == label;
      int nd;
      if (left_in && (right_in || cross_pinch))
        nd = (d + 3) % 4;
      else if (right_in)
        nd = d;
      else
        nd = (d + 1) % 4;
      if (nd != d) ring.push_back({x, y});
      d = nd;
    } while (!(x == x0 && y == y0 && d == d0));

    // Rotate to the top-most, left-most vertex and close.
    auto best = std::min_element(ring.begin(), ring.end(), [](const auto& a, const auto& b) {
      return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    std::rotate(ring.begin(), best, ring.end());
    ring.push_back(ring.front());
    return ring;
  };

  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      const std::int32_t l = lab(r, c);
      if (l <= 0 || l > labeled.n_instances) continue;
      // Sides in order top, right, bottom, left with their start vertex and heading.
      const struct {
        bool boundary;
        long x, y;
        int d;
      } sides[4] = {
          {cell(c, r - 1) != l, c, r, 0},
          {cell(c + 1, r) != l, c + 1, r, 1},
          {cell(c, r + 1) != l, c + 1, r + 1, 2},
          {cell(c - 1, r) != l, c, r + 1, 3},
      };
      for (const auto& s : sides) {
        if (!s.boundary || visited[edge_id(s.x, s.y, s.d)]) continue;
        LatticeRing ring = trace(l, s.x, s.y, s.d);
        auto& rings = polys[l - 1].rings;
        if (doubled_signed_area(ring) > 0)
          rings.insert(rings.begin(), std::move(ring));
        else
          rings.push_back(std::move(ring));
      }
    }
  }
  return polys;
}

Grid<std::uint8_t> fill_even_odd(const std::vector<std::vector<Vertex>>& rings,
                                 Eigen::Index width, Eigen::Index height) {
  Grid<std::uint8_t> out = Grid<std::uint8_t>::Zero(height, width);
  std::vector<double> xs;
  for (Eigen::Index r = 0; r < height; ++r) {
    const double yc = static_cast<double>(r) + 0.5;
    xs.clear();
    for (const auto& ring : rings) {
      for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const Vertex& a = ring[i];
        const Vertex& b = ring[i + 1];
        if ((a.y > yc) == (b.y > yc)) continue;
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const auto c0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor(xs[i] - 0.5)) + 1);
      const auto c1 = std::min<Eigen::Index>(
          width - 1, static_cast<Eigen::Index>(std::ceil(xs[i + 1] - 0.5)) - 1);
      for (Eigen::Index c = c0; c <= c1; ++c) out(r, c) ^= 1;
    }
  }
  return out;
}

InstancePolygonSet polygonize(const LabeledMask& labeled) {
  InstancePolygonSet set;
  set.crs = labeled.transform().crs;
  for (const auto& lp : trace_boundaries(labeled)) {
    InstancePolygon poly;
    poly.instance_id = lp.instance_id;
    poly.pixel_area = lp.pixel_area;
    for (const auto& ring : lp.rings) {
      std::vector<MapPoint> pts;
      pts.reserve(ring.size());
      for (const auto& v : ring) pts.push_back(pixel_to_map(labeled.transform(), v.y, v.x));
      poly.rings.push_back(std::move(pts));
    }
    set.polygons.push_back(std::move(poly));
  }
  return set;
}

LabeledMask rasterize(const InstancePolygonSet& polyset, const GeoTransform& transform,
                      Eigen::Index width, Eigen::Index height, Connectivity connectivity) {
  LabeledMask out;
  out.connectivity = connectivity;
  out.labels = GeoRaster<std::int32_t>(Grid<std::int32_t>::Zero(height, width), transform);
  constexpr double kTol = 1e-6;
  for (const auto& poly : polyset.polygons) {
    std::vector<std::vector<Vertex>> rings;
    for (const auto& ring : poly.rings) {
      std::vector<Vertex> pix;
      pix.reserve(ring.size());
      for (const auto& p : ring) {
        Vertex v{(p.x - transform.origin_x) / transform.pixel_w,
                 (transform.origin_y - p.y) / transform.pixel_h};
        if (v.x < -kTol || v.y < -kTol || v.x > width + kTol || v.y > height + kTol)
          throw ExtentError("instance " + std::to_string(poly.instance_id) +
                            " has a vertex outside the grid");
        // Lattice vertices come back within float noise of integers.
        if (std::abs(v.x - std::round(v.x)) < kTol) v.x = std::round(v.x);
        if (std::abs(v.y - std::round(v.y)) < kTol) v.y = std::round(v.y);
        pix.push_back(v);
      }
      rings.push_back(std::move(pix));
    }
    const Grid<std::uint8_t> filled = fill_even_odd(rings, width, height);
    out.labels.values = (filled != 0).select(poly.instance_id, out.labels.values);
    out.n_instances = std::max(out.n_instances, poly.instance_id);
  }
  return out;
}

std::string to_geojson(const InstancePolygonSet& polyset) {
  json features = json::array();
  for (const auto& poly : polyset.polygons) {
    json coords = json::array();
    for (const auto& ring : poly.rings) {
      json r = json::array();
      for (const auto& p : ring) r.push_back({p.x, p.y});
      coords.push_back(std::move(r));
    }
    features.push_back({{"type", "Feature"},
                        {"properties",
                         {{"instance_id", poly.instance_id}, {"pixel_area", poly.pixel_area}}},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", coords}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  if (!polyset.crs.empty())
    doc["crs"] = {{"type", "name"}, {"properties", {{"name", polyset.crs}}}};
  return doc.dump() + "\n";
}

InstancePolygonSet polygons_from_geojson(const std::string& text) {
  InstancePolygonSet set;
  try {
    const json doc = json::parse(text);
    if (doc.contains("crs")) set.crs = doc.at("crs").at("properties").at("name").get<std::string>();
    for (const auto& f : doc.at("features")) {
      const auto& geom = f.at("geometry");
      if (geom.at("type") != "Polygon") throw FormatError("only Polygon features are supported");
      InstancePolygon poly;
      poly.instance_id = f.at("properties").at("instance_id").get<int>();
      poly.pixel_area = f.at("properties").value("pixel_area", std::int64_t{0});
      for (const auto& ring : geom.at("coordinates")) {
        std::vector<MapPoint> pts;
        for (const auto& p : ring) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        poly.rings.push_back(std::move(pts));
      }
      set.polygons.push_back(std::move(poly));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad polygon GeoJSON: ") + e.what());
  }
  return set;
}

void write_geojson(const std::filesystem::path& path, const InstancePolygonSet& polyset) {
  write_text_atomically(path, to_geojson(polyset));
}

}  // namespace ows
