// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/patch.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "obbkit/error.hpp"

namespace obbkit {

ImageRaster extract_patch(const ImageRaster& image, const OrientedBox& box,
                          const PatchSpec& spec) {
  validate(box);
  if (spec.out_long == 0 || spec.out_short == 0 || spec.channels == 0) {
    throw InvalidSpecError("patch dimensions must be positive");
  }
  if (!std::isfinite(spec.fill)) throw InvalidSpecError("patch fill is not finite");
  const std::size_t src_ch = image.channels();
  if (src_ch != spec.channels && src_ch != 1) {
    throw ChannelError("cannot adapt " + std::to_string(src_ch) +
                       " source channels to " + std::to_string(spec.channels));
  }

  const bool w_is_long = box.w >= box.h;
  const Point long_dir = w_is_long ? box.axis_u() : box.axis_v();
  const Point short_dir{-long_dir.y, long_dir.x};
  const double long_len = w_is_long ? box.w : box.h;
  const double short_len = w_is_long ? box.h : box.w;
  const double cols = static_cast<double>(spec.out_long);
  const double rows = static_cast<double>(spec.out_short);
  const double long_px = long_len / cols;
  const double short_px = short_len / rows;

  const auto width = static_cast<long long>(image.width());
  const auto height = static_cast<long long>(image.height());
  std::vector<double> texel(spec.channels);

  ImageRaster out(spec.out_long, spec.out_short, spec.channels, spec.fill);
  for (std::size_t r = 0; r < spec.out_short; ++r) {
    const double b = (static_cast<double>(r) + 0.5 - 0.5 * rows) * short_px;
    for (std::size_t c = 0; c < spec.out_long; ++c) {
      const double a = (static_cast<double>(c) + 0.5 - 0.5 * cols) * long_px;
      const double x = box.cx + a * long_dir.x + b * short_dir.x;
      const double y = box.cy + a * long_dir.y + b * short_dir.y;

      // Pixel centers sit at half-integers.
      const double fx = x - 0.5;
      const double fy = y - 0.5;
      const double x0f = std::floor(fx);
      const double y0f = std::floor(fy);
      const double tx = fx - x0f;
      const double ty = fy - y0f;
      const auto x0 = static_cast<long long>(x0f);
      const auto y0 = static_cast<long long>(y0f);

      for (std::size_t ch = 0; ch < spec.channels; ++ch) {
        const std::size_t sc = src_ch == 1 ? 0 : ch;
        auto sample = [&](long long px, long long py) {
          if (px < 0 || py < 0 || px >= width || py >= height) return spec.fill;
          return image.at(static_cast<std::size_t>(py),
                          static_cast<std::size_t>(px), sc);
        };
        out.at(r, c, ch) = sample(x0, y0) * (1.0 - tx) * (1.0 - ty) +
                           sample(x0 + 1, y0) * tx * (1.0 - ty) +
                           sample(x0, y0 + 1) * (1.0 - tx) * ty +
                           sample(x0 + 1, y0 + 1) * tx * ty;
      }
    }
  }
  return out;
}

}  // namespace obbkit
