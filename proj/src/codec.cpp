// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/codec.hpp"

#include <cmath>
#include <numeric>

#include "obbkit/error.hpp"

namespace obbkit {

namespace {

constexpr double kMaxLogExtent = 20.0;

bool all_positive(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) {
    return std::isfinite(v) && v > 0.0;
  });
}

bool hulls_overlap(const OrientedBox& a, const OrientedBox& b) {
  const auto ha = axis_aligned_hull(a);
  const auto hb = axis_aligned_hull(b);
  return ha[0] <= hb[2] && hb[0] <= ha[2] && ha[1] <= hb[3] && hb[1] <= ha[3];
}

}  // namespace

std::vector<OrientedBox> gen_anchors(double image_w, double image_h,
                                     const AnchorSpec& spec) {
  if (!(spec.stride >= 1.0) || !std::isfinite(spec.stride)) {
    throw InvalidSpecError("anchor stride must be >= 1");
  }
  if (spec.scales.empty() || spec.ratios.empty()) {
    throw InvalidSpecError("anchor scales and ratios must be non-empty");
  }
  if (!all_positive(spec.scales) || !all_positive(spec.ratios)) {
    throw InvalidSpecError("anchor scales and ratios must be positive");
  }
  for (double a : spec.angles) {
    if (!std::isfinite(a)) throw InvalidSpecError("anchor angle is not finite");
  }
  if (!(image_w >= spec.stride) || !(image_h >= spec.stride)) {
    throw InvalidSpecError("image dimensions must be at least one stride");
  }

  const auto cols = static_cast<std::size_t>(std::floor(image_w / spec.stride));
  const auto rows = static_cast<std::size_t>(std::floor(image_h / spec.stride));
  const std::vector<double> angles =
      spec.angles.empty() ? std::vector<double>{0.0} : spec.angles;

  std::vector<OrientedBox> anchors;
  anchors.reserve(rows * cols * spec.anchors_per_cell());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double cx = (static_cast<double>(c) + 0.5) * spec.stride;
      const double cy = (static_cast<double>(r) + 0.5) * spec.stride;
      for (double s : spec.scales) {
        for (double ratio : spec.ratios) {
          const double root = std::sqrt(ratio);
          for (double angle : angles) {
            anchors.push_back({cx, cy, s * root, s / root, angle});
          }
        }
      }
    }
  }
  return anchors;
}

BoxDelta encode(const OrientedBox& gt, const OrientedBox& anchor) {
  validate(gt);
  validate(anchor);
  const double c = std::cos(anchor.theta);
  const double s = std::sin(anchor.theta);
  const double dx = gt.cx - anchor.cx;
  const double dy = gt.cy - anchor.cy;
  return {
      (dx * c + dy * s) / anchor.w,
      (-dx * s + dy * c) / anchor.h,
      std::log(gt.w / anchor.w),
      std::log(gt.h / anchor.h),
      wrap_half_pi(gt.theta - anchor.theta),
  };
}

OrientedBox decode(const BoxDelta& delta, const OrientedBox& anchor) {
  validate(anchor);
  if (!std::isfinite(delta.tx) || !std::isfinite(delta.ty) ||
      !std::isfinite(delta.ttheta)) {
    throw InvalidBoxError("box delta is not finite");
  }
  if (!(std::abs(delta.tw) <= kMaxLogExtent) ||
      !(std::abs(delta.th) <= kMaxLogExtent)) {
    throw OverflowGuardError("log extent residual exceeds 20");
  }
  const double c = std::cos(anchor.theta);
  const double s = std::sin(anchor.theta);
  const double du = delta.tx * anchor.w;
  const double dv = delta.ty * anchor.h;
  return canonicalize({
      anchor.cx + du * c - dv * s,
      anchor.cy + du * s + dv * c,
      anchor.w * std::exp(delta.tw),
      anchor.h * std::exp(delta.th),
      anchor.theta + delta.ttheta,
  });
}

std::vector<AnchorLabel> match(std::span<const OrientedBox> anchors,
                               std::span<const OrientedBox> gts,
                               const MatchOptions& options) {
  if (!(options.pos_thresh >= options.neg_thresh)) {
    throw InvalidSpecError("pos_thresh must be >= neg_thresh");
  }
  const IouFn iou = options.iou_fn ? options.iou_fn : IouFn(skew_iou);
  const auto center_dist2 = [](const OrientedBox& a, const OrientedBox& b) {
    return (a.cx - b.cx) * (a.cx - b.cx) + (a.cy - b.cy) * (a.cy - b.cy);
  };

  const std::size_t n = anchors.size();
  const std::size_t m = gts.size();
  std::vector<AnchorLabel> labels(n);
  // Best anchor per ground truth: (iou, -distance) maximized, lowest index.
  std::vector<std::size_t> best_anchor(m, 0);
  std::vector<double> best_anchor_iou(m, -1.0);
  std::vector<double> best_anchor_dist(m, 0.0);

  for (std::size_t a = 0; a < n; ++a) {
    double best = -1.0;
    double best_dist = 0.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < m; ++g) {
      const double v = iou(anchors[a], gts[g]);
      const double d = center_dist2(anchors[a], gts[g]);
      if (v > best || (v == best && d < best_dist)) {
        best = v;
        best_dist = d;
        best_gt = static_cast<int>(g);
      }
      if (v > best_anchor_iou[g] ||
          (v == best_anchor_iou[g] && d < best_anchor_dist[g])) {
        best_anchor_iou[g] = v;
        best_anchor_dist[g] = d;
        best_anchor[g] = a;
      }
    }
    AnchorLabel& label = labels[a];
    label.iou = std::max(best, 0.0);
    if (best_gt >= 0 && best >= options.pos_thresh) {
      label.kind = AnchorLabel::Kind::kPositive;
      label.gt_index = best_gt;
    } else if (best_gt < 0 || best < options.neg_thresh) {
      label.kind = AnchorLabel::Kind::kNegative;
    } else {
      label.kind = AnchorLabel::Kind::kIgnore;
    }
  }

  if (options.force_best && n > 0) {
    for (std::size_t g = 0; g < m; ++g) {
      AnchorLabel& label = labels[best_anchor[g]];
      label.kind = AnchorLabel::Kind::kPositive;
      label.gt_index = static_cast<int>(g);
    }
  }
  return labels;
}

std::vector<std::size_t> rotated_nms(std::span<const ScoredBox> dets,
                                     double iou_thresh) {
  if (!(iou_thresh >= 0.0 && iou_thresh <= 1.0)) {
    throw InvalidSpecError("NMS IoU threshold must lie in [0, 1]");
  }
  for (const ScoredBox& d : dets) {
    validate(d.box);
    if (!std::isfinite(d.score)) {
      throw InvalidSpecError("detection score is not finite");
    }
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (!hulls_overlap(dets[idx].box, dets[k].box)) continue;
      if (skew_iou(dets[idx].box, dets[k].box) > iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

}  // namespace obbkit
