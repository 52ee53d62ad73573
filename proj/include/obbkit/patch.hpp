// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "obbkit/geometry.hpp"
#include "obbkit/image.hpp"

namespace obbkit {

/// Output geometry of a candidate-box patch. The long side of the box maps
/// to `out_long` columns and the short side to `out_short` rows.
struct PatchSpec {
  std::size_t out_long = 600;
  std::size_t out_short = 100;
  std::size_t channels = 3;
  /// Value read for source points outside the image.
  double fill = 0.0;
};

/// Clips, rotates and scales the region under `box` into an
/// out_short x out_long x channels raster by bilinear sampling.
///
/// Column c and row r sample the source at
///   center + (c + 0.5 - out_long/2) * (long/out_long) * L
///          + (r + 0.5 - out_short/2) * (short/out_short) * S
/// where L is the direction of the box's longer side (the w-axis when
/// w >= h, else the h-axis) and S is L turned by +pi/2. A single-channel
/// source is duplicated into every output channel; any other channel
/// mismatch throws ChannelError.
ImageRaster extract_patch(const ImageRaster& image, const OrientedBox& box,
                          const PatchSpec& spec = {});

}  // namespace obbkit
