// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace obbkit {

/// Dense H x W x C image, row-major with interleaved channels. Pixel (r, c)
/// covers [c, c+1) x [r, r+1); its value sits at the pixel center.
class ImageRaster {
 public:
  ImageRaster() = default;
  ImageRaster(std::size_t width, std::size_t height, std::size_t channels = 3,
              double fill = 0.0);
  /// Takes ownership of `samples`; throws InvalidSpecError on a size mismatch
  /// or a non-finite value.
  ImageRaster(std::size_t width, std::size_t height, std::size_t channels,
              std::vector<double> samples);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return channels_; }

  double& at(std::size_t row, std::size_t col, std::size_t ch) {
    return samples_[(row * width_ + col) * channels_ + ch];
  }
  double at(std::size_t row, std::size_t col, std::size_t ch) const {
    return samples_[(row * width_ + col) * channels_ + ch];
  }

  const std::vector<double>& samples() const { return samples_; }

  bool operator==(const ImageRaster&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> samples_;
};

/// Binary PPM (P6, maxval 255). Values are clamped to [0, 1] and scaled by
/// 255 with rounding; single-channel rasters are written as gray RGB.
void write_ppm(std::ostream& out, const ImageRaster& image);
/// Reads P6 with any maxval in [1, 255]; samples become value / maxval.
ImageRaster read_ppm(std::istream& in);

/// Planar float32 little-endian container:
///   "OBBR" | u32 width | u32 height | u32 channels | samples[c][r][col]
void write_obbr(std::ostream& out, const ImageRaster& image);
ImageRaster read_obbr(std::istream& in);

/// Dispatch on the file extension: ".ppm" or ".obbr".
void write_image(const std::filesystem::path& path, const ImageRaster& image);
ImageRaster read_image(const std::filesystem::path& path);

}  // namespace obbkit
