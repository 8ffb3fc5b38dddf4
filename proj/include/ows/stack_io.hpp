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

#include <filesystem>

#include "ows/raster.hpp"

namespace ows {

// Manifest: {"crs": "<id>", "frames": [{"path": "<rel-path>", "date": "YYYY-MM-DD"}, ...]}.
// Paths are resolved against the manifest's directory. Frames come back sorted by date.
SarStack load_stack(const std::filesystem::path& manifest_path);

// Writes one float32 GeoTIFF per frame plus `stack.json` into `dir`; returns the manifest path.
std::filesystem::path save_stack(const SarStack& stack, const std::filesystem::path& dir);

}  // namespace ows
