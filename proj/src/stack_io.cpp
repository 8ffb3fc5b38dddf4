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

#include "ows/stack_io.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"
#include "ows/geotiff.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ows {

SarStack load_stack(const fs::path& manifest_path) {
  const std::string text = read_text_file(manifest_path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestParseError(manifest_path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array())
    throw ManifestParseError(manifest_path.string() + ": missing \"frames\" array");
  if (doc["frames"].empty()) throw ManifestParseError(manifest_path.string() + ": no frames");
  std::string crs;
  if (doc.contains("crs")) {
    if (!doc["crs"].is_string()) throw ManifestParseError("\"crs\" must be a string");
    crs = doc["crs"].get<std::string>();
  }

  struct Entry {
    fs::path path;
    Date date;
  };
  std::vector<Entry> entries;
  std::set<Date> seen;
  const fs::path base = manifest_path.parent_path();
  for (const auto& f : doc["frames"]) {
    if (!f.is_object() || !f.contains("path") || !f.contains("date") || !f["path"].is_string() ||
        !f["date"].is_string())
      throw ManifestParseError("frame entries need string \"path\" and \"date\"");
    const auto date = parse_iso_date(f["date"].get<std::string>());
    if (!date) throw ManifestParseError("bad date \"" + f["date"].get<std::string>() + "\"");
    if (!seen.insert(*date).second)
      throw ManifestParseError("duplicate date " + format_iso_date(*date));
    entries.push_back({base / f["path"].get<std::string>(), *date});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.date < b.date; });

  std::vector<Raster> frames;
  std::vector<Date> dates;
  for (const auto& e : entries) {
    if (!fs::exists(e.path)) throw MissingFileError("frame not found: " + e.path.string());
    Raster r = read_geotiff<float>(e.path);
    if (r.transform.crs.empty()) {
      r.transform.crs = crs;
    } else if (!crs.empty() && r.transform.crs != crs) {
      throw GridMismatchError(e.path.string() + ": CRS " + r.transform.crs +
                              " differs from manifest CRS " + crs);
    }
    frames.push_back(std::move(r));
    dates.push_back(e.date);
  }
  return SarStack(std::move(frames), std::move(dates));
}

fs::path save_stack(const SarStack& stack, const fs::path& dir) {
  fs::create_directories(dir);
  json frames = json::array();
  for (std::size_t i = 0; i < stack.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "frame_%03zu_%s.tif", i,
                  format_iso_date(stack.dates()[i]).c_str());
    write_geotiff(dir / name, stack.frames()[i]);
    frames.push_back({{"path", name}, {"date", format_iso_date(stack.dates()[i])}});
  }
  json doc = {{"crs", stack.transform().crs}, {"frames", frames}};
  const fs::path manifest = dir / "stack.json";
  write_text_atomically(manifest, doc.dump(2) + "\n");
  return manifest;
}

}  // namespace ows
