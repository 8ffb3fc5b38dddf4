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

#include "ows/geotiff.hpp"

#include <tiffio.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <regex>
#include <string>

#include "ows/errors.hpp"
#include "ows/fsutil.hpp"

namespace fs = std::filesystem;

namespace ows {
namespace {

constexpr ttag_t kModelPixelScale = 33550;
constexpr ttag_t kModelTiepoint = 33922;
constexpr ttag_t kGeoKeyDirectory = 34735;
constexpr ttag_t kGeoDoubleParams = 34736;
constexpr ttag_t kGeoAsciiParams = 34737;
constexpr ttag_t kGdalNodata = 42113;

// GeoKey ids.
constexpr std::uint16_t kGTModelType = 1024;
constexpr std::uint16_t kGTRasterType = 1025;
constexpr std::uint16_t kGTCitation = 1026;
constexpr std::uint16_t kGeographicType = 2048;
constexpr std::uint16_t kProjectedCSType = 3072;

const TIFFFieldInfo kGeoFields[] = {
    {kModelPixelScale, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelPixelScaleTag")},
    {kModelTiepoint, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelTiepointTag")},
    {kGeoKeyDirectory, -1, -1, TIFF_SHORT, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("GeoKeyDirectoryTag")},
    {kGeoDoubleParams, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("GeoDoubleParamsTag")},
    {kGeoAsciiParams, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0,
     const_cast<char*>("GeoASCIIParamsTag")},
    {kGdalNodata, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0, const_cast<char*>("GDALNoDataValue")},
};

TIFFExtendProc g_parent_extender = nullptr;

void geo_tag_extender(TIFF* tif) {
  TIFFMergeFieldInfo(tif, kGeoFields, sizeof(kGeoFields) / sizeof(kGeoFields[0]));
  if (g_parent_extender) g_parent_extender(tif);
}

void silence(const char*, const char*, va_list) {}

void register_geo_tags() {
  static std::once_flag once;
  std::call_once(once, [] {
    g_parent_extender = TIFFSetTagExtender(geo_tag_extender);
    TIFFSetWarningHandler(silence);
  });
}

struct TiffCloser {
  void operator()(TIFF* t) const { TIFFClose(t); }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

TiffPtr open_tiff(const fs::path& path, const char* mode) {
  register_geo_tags();
  TiffPtr tif(TIFFOpen(path.c_str(), mode));
  if (!tif) throw IoError("cannot open TIFF " + path.string());
  return tif;
}

template <typename Scalar>
struct SampleTraits;
template <>
struct SampleTraits<float> {
  static constexpr std::uint16_t kFormat = SAMPLEFORMAT_IEEEFP;
};
template <>
struct SampleTraits<std::uint8_t> {
  static constexpr std::uint16_t kFormat = SAMPLEFORMAT_UINT;
};
template <>
struct SampleTraits<std::int32_t> {
  static constexpr std::uint16_t kFormat = SAMPLEFORMAT_INT;
};

std::string format_nodata(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::optional<int> epsg_code(const std::string& crs) {
  static const std::regex re(R"(^EPSG:(\d+)$)", std::regex::icase);
  std::smatch m;
  if (std::regex_match(crs, m, re)) return std::stoi(m[1].str());
  return std::nullopt;
}

void write_georeferencing(TIFF* tif, const GeoTransform& t, const std::optional<double>& nodata) {
  const double scale[3] = {t.pixel_w, t.pixel_h, 0.0};
  const double tiepoint[6] = {0.0, 0.0, 0.0, t.origin_x, t.origin_y, 0.0};
  TIFFSetField(tif, kModelPixelScale, 3, scale);
  TIFFSetField(tif, kModelTiepoint, 6, tiepoint);

  std::vector<std::uint16_t> keys;
  auto add_key = [&](std::uint16_t id, std::uint16_t loc, std::uint16_t count, std::uint16_t v) {
    keys.insert(keys.end(), {id, loc, count, v});
  };
  const auto code = epsg_code(t.crs);
  const bool geographic = code && *code >= 4000 && *code < 5000;
  add_key(kGTModelType, 0, 1, geographic ? 2 : 1);
  add_key(kGTRasterType, 0, 1, 1);  // PixelIsArea
  std::string ascii;
  if (!t.crs.empty()) {
    ascii = t.crs + "|";
    add_key(kGTCitation, static_cast<std::uint16_t>(kGeoAsciiParams),
            static_cast<std::uint16_t>(ascii.size()), 0);
  }
  if (code && *code > 0 && *code < 65535)
    add_key(geographic ? kGeographicType : kProjectedCSType, 0, 1,
            static_cast<std::uint16_t>(*code));
  std::vector<std::uint16_t> dir = {1, 1, 0, static_cast<std::uint16_t>(keys.size() / 4)};
  dir.insert(dir.end(), keys.begin(), keys.end());
  TIFFSetField(tif, kGeoKeyDirectory, static_cast<std::uint32_t>(dir.size()), dir.data());
  if (!ascii.empty()) TIFFSetField(tif, kGeoAsciiParams, ascii.c_str());
  if (nodata) TIFFSetField(tif, kGdalNodata, format_nodata(*nodata).c_str());
}

GeoTransform read_georeferencing(TIFF* tif, const fs::path& path) {
  GeoTransform t;
  std::uint32_t n = 0;
  double* scale = nullptr;
  double* tie = nullptr;
  if (!TIFFGetField(tif, kModelPixelScale, &n, &scale) || n < 2)
    throw FormatError("missing ModelPixelScaleTag in " + path.string());
  t.pixel_w = scale[0];
  t.pixel_h = scale[1];
  if (!TIFFGetField(tif, kModelTiepoint, &n, &tie) || n < 6)
    throw FormatError("missing ModelTiepointTag in " + path.string());
  // Tiepoint maps raster (i, j) to model (x, y); reduce to the (0, 0) corner.
  t.origin_x = tie[3] - tie[0] * t.pixel_w;
  t.origin_y = tie[4] + tie[1] * t.pixel_h;
  if (!(t.pixel_w > 0) || !(t.pixel_h > 0))
    throw FormatError("non-positive pixel size in " + path.string());

  std::uint16_t* dir = nullptr;
  std::uint32_t dir_n = 0;
  if (TIFFGetField(tif, kGeoKeyDirectory, &dir_n, &dir) && dir_n >= 4) {
    char* ascii = nullptr;
    TIFFGetField(tif, kGeoAsciiParams, &ascii);
    const std::uint32_t nkeys = std::min<std::uint32_t>(dir[3], (dir_n - 4) / 4);
    std::optional<int> code;
    for (std::uint32_t k = 0; k < nkeys; ++k) {
      const std::uint16_t* key = dir + 4 + 4 * k;
      if (key[0] == kGTCitation && key[1] == kGeoAsciiParams && ascii) {
        std::string s(ascii);
        if (key[3] < s.size()) s = s.substr(key[3], key[2]);
        while (!s.empty() && (s.back() == '|' || s.back() == '\0')) s.pop_back();
        t.crs = s;
      } else if ((key[0] == kProjectedCSType || key[0] == kGeographicType) && key[1] == 0) {
        code = key[3];
      }
    }
    if (t.crs.empty() && code) t.crs = "EPSG:" + std::to_string(*code);
  }
  return t;
}

std::optional<double> read_nodata(TIFF* tif) {
  char* text = nullptr;
  if (!TIFFGetField(tif, kGdalNodata, &text) || !text) return std::nullopt;
  std::string s(text);
  if (s == "nan" || s == "NaN" || s == "NAN") return std::nan("");
  return std::strtod(s.c_str(), nullptr);
}

template <typename Scalar>
void write_planes(const fs::path& path, std::span<const Grid<Scalar>> bands,
                  const GeoTransform& transform, const std::optional<double>& nodata) {
  if (bands.empty()) throw FormatError("no bands to write");
  const auto rows = bands.front().rows();
  const auto cols = bands.front().cols();
  write_atomically(path, [&](const fs::path& tmp) {
    TiffPtr tif = open_tiff(tmp, "w");
    TIFF* t = tif.get();
    TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(cols));
    TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(rows));
    TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(bands.size()));
    TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(8 * sizeof(Scalar)));
    TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, SampleTraits<Scalar>::kFormat);
    TIFFSetField(t, TIFFTAG_PLANARCONFIG,
                 bands.size() > 1 ? PLANARCONFIG_SEPARATE : PLANARCONFIG_CONTIG);
    TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));
    if (bands.size() > 1) {
      std::vector<std::uint16_t> extra(bands.size() - 1, EXTRASAMPLE_UNSPECIFIED);
      TIFFSetField(t, TIFFTAG_EXTRASAMPLES, static_cast<std::uint16_t>(extra.size()),
                   extra.data());
    }
    write_georeferencing(t, transform, nodata);
    std::vector<Scalar> line(static_cast<std::size_t>(cols));
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const Grid<Scalar>& band = bands[b];
      if (band.rows() != rows || band.cols() != cols)
        throw DimMismatchError("bands differ in size");
      for (Eigen::Index r = 0; r < rows; ++r) {
        std::memcpy(line.data(), band.row(r).data(), line.size() * sizeof(Scalar));
        if (TIFFWriteScanline(t, line.data(), static_cast<std::uint32_t>(r),
                              static_cast<std::uint16_t>(b)) < 0)
          throw IoError("failed writing " + tmp.string());
      }
    }
    if (!TIFFWriteDirectory(t)) throw IoError("failed writing directory " + tmp.string());
  });
}

template <typename Scalar>
std::vector<Grid<Scalar>> read_planes(const fs::path& path, GeoTransform& transform,
                                      std::optional<double>& nodata) {
  if (!fs::exists(path)) throw MissingFileError("raster not found: " + path.string());
  TiffPtr tif = open_tiff(path, "r");
  TIFF* t = tif.get();
  std::uint32_t w = 0, h = 0;
  std::uint16_t spp = 1, bps = 0, fmt = SAMPLEFORMAT_UINT, planar = PLANARCONFIG_CONTIG;
  TIFFGetField(t, TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(t, TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(t, TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(t, TIFFTAG_BITSPERSAMPLE, &bps);
  TIFFGetFieldDefaulted(t, TIFFTAG_SAMPLEFORMAT, &fmt);
  TIFFGetFieldDefaulted(t, TIFFTAG_PLANARCONFIG, &planar);
  if (bps != 8 * sizeof(Scalar) || fmt != SampleTraits<Scalar>::kFormat)
    throw FormatError("unexpected sample type in " + path.string());
  if (TIFFIsTiled(t)) throw FormatError("tiled TIFF not supported: " + path.string());
  transform = read_georeferencing(t, path);
  nodata = read_nodata(t);

  std::vector<Grid<Scalar>> bands(spp, Grid<Scalar>(h, w));
  std::vector<Scalar> line(static_cast<std::size_t>(TIFFScanlineSize(t) / sizeof(Scalar)));
  if (planar == PLANARCONFIG_SEPARATE || spp == 1) {
    for (std::uint16_t b = 0; b < spp; ++b)
      for (std::uint32_t r = 0; r < h; ++r) {
        if (TIFFReadScanline(t, line.data(), r, b) < 0)
          throw IoError("failed reading " + path.string());
        std::memcpy(bands[b].row(r).data(), line.data(), w * sizeof(Scalar));
      }
  } else {
    for (std::uint32_t r = 0; r < h; ++r) {
      if (TIFFReadScanline(t, line.data(), r, 0) < 0)
        throw IoError("failed reading " + path.string());
      for (std::uint32_t c = 0; c < w; ++c)
        for (std::uint16_t b = 0; b < spp; ++b) bands[b](r, c) = line[c * spp + b];
    }
  }
  return bands;
}

}  // namespace

template <typename Scalar>
void write_geotiff(const fs::path& path, const GeoRaster<Scalar>& raster) {
  std::optional<double> nd;
  if (raster.nodata) nd = static_cast<double>(*raster.nodata);
  write_planes<Scalar>(path, std::span<const Grid<Scalar>>(&raster.values, 1), raster.transform,
                       nd);
}

template <typename Scalar>
GeoRaster<Scalar> read_geotiff(const fs::path& path) {
  GeoTransform t;
  std::optional<double> nd;
  auto bands = read_planes<Scalar>(path, t, nd);
  std::optional<Scalar> nodata;
  if (nd) nodata = static_cast<Scalar>(*nd);
  return GeoRaster<Scalar>(std::move(bands.front()), std::move(t), nodata);
}

template void write_geotiff<float>(const fs::path&, const GeoRaster<float>&);
template void write_geotiff<std::uint8_t>(const fs::path&, const GeoRaster<std::uint8_t>&);
template void write_geotiff<std::int32_t>(const fs::path&, const GeoRaster<std::int32_t>&);
template GeoRaster<float> read_geotiff<float>(const fs::path&);
template GeoRaster<std::uint8_t> read_geotiff<std::uint8_t>(const fs::path&);
template GeoRaster<std::int32_t> read_geotiff<std::int32_t>(const fs::path&);

void write_geotiff_bands(const fs::path& path, std::span<const Grid<float>> bands,
                         const GeoTransform& transform, std::optional<float> nodata) {
  std::optional<double> nd;
  if (nodata) nd = *nodata;
  write_planes<float>(path, bands, transform, nd);
}

BandSet read_geotiff_bands(const fs::path& path) {
  BandSet out;
  std::optional<double> nd;
  out.bands = read_planes<float>(path, out.transform, nd);
  if (nd) out.nodata = static_cast<float>(*nd);
  return out;
}

}  // namespace ows
