// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "obbkit/geometry.hpp"

namespace obbkit {

/// Anchor layout. Ratios are w:h and area-preserving: w = s*sqrt(r),
/// h = s/sqrt(r). An empty angle list yields horizontal anchors.
struct AnchorSpec {
  double stride = 16.0;
  std::vector<double> scales{32.0};
  std::vector<double> ratios{1.0};
  std::vector<double> angles{};

  std::size_t anchors_per_cell() const {
    return scales.size() * ratios.size() * std::max<std::size_t>(1, angles.size());
  }
};

/// Anchors for every cell in row-major order, then scale, ratio, angle.
std::vector<OrientedBox> gen_anchors(double image_w, double image_h,
                                     const AnchorSpec& spec);

/// Regression residuals of a box relative to an anchor. Center offsets are
/// measured in the anchor frame and normalized by its extents.
struct BoxDelta {
  double tx = 0.0;
  double ty = 0.0;
  double tw = 0.0;
  double th = 0.0;
  double ttheta = 0.0;

  bool operator==(const BoxDelta&) const = default;
};

BoxDelta encode(const OrientedBox& gt, const OrientedBox& anchor);

/// Inverse of encode; the result is canonicalized. Throws OverflowGuardError
/// when |tw| or |th| exceeds 20.
OrientedBox decode(const BoxDelta& delta, const OrientedBox& anchor);

using IouFn = std::function<double(const OrientedBox&, const OrientedBox&)>;

struct AnchorLabel {
  enum class Kind { kNegative, kIgnore, kPositive };
  Kind kind = Kind::kNegative;
  /// Ground-truth index for positives, -1 otherwise.
  int gt_index = -1;
  /// Best IoU over all ground truths (0 when there are none).
  double iou = 0.0;

  bool operator==(const AnchorLabel&) const = default;
};

struct MatchOptions {
  double pos_thresh = 0.5;
  double neg_thresh = 0.4;
  /// Forces each ground truth's best anchor positive.
  bool force_best = true;
  /// Defaults to skew_iou when empty.
  IouFn iou_fn{};
};

/// Per-anchor labels. IoU ties are broken by smaller center distance, then
/// by lower index. Forced assignments are applied in ground-truth order, so
/// a later ground truth wins an anchor that is best for two of them.
std::vector<AnchorLabel> match(std::span<const OrientedBox> anchors,
                               std::span<const OrientedBox> gts,
                               const MatchOptions& options = {});

struct ScoredBox {
  OrientedBox box;
  double score = 0.0;
};

/// Greedy rotated non-maximum suppression. Returns kept input indices in
/// descending score order (ties by input index). A box is suppressed when
/// its skew IoU with a kept box exceeds `iou_thresh`.
std::vector<std::size_t> rotated_nms(std::span<const ScoredBox> dets,
                                     double iou_thresh = 0.3);

}  // namespace obbkit
