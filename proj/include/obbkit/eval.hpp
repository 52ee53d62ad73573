// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obbkit/codec.hpp"
#include "obbkit/records.hpp"

namespace obbkit {

enum class ApMode {
  /// Area under the monotone precision envelope over every recall step.
  kAllPoints,
  /// Mean envelope precision at recall 0, 0.1, ..., 1.0.
  kElevenPoint,
};

/// True-positive flags for `dets`, in input order.
///
/// Detections are visited in descending score (ties by input order). Each
/// takes the unmatched ground truth of the same image and class with the
/// highest IoU (ties by lower index) and is a true positive if that IoU is at
/// least `iou_thresh`; otherwise it is a false positive.
std::vector<bool> match_detections(std::span<const DetectionRecord> dets,
                                   std::span<const GroundTruthRecord> gts,
                                   double iou_thresh = 0.5,
                                   const IouFn& iou_fn = {});

/// AP from true-positive flags already sorted by descending score.
/// With no ground truth, AP is 1 if there are no detections and 0 otherwise.
double average_precision(std::span<const bool> flags_by_score,
                         std::size_t gt_count,
                         ApMode mode = ApMode::kAllPoints);

struct EvalConfig {
  double iou_thresh = 0.5;
  ApMode ap_mode = ApMode::kAllPoints;
  /// Defaults to skew_iou when empty.
  IouFn iou_fn{};
  /// Strict mode rejects detections on unknown images and records of
  /// unlisted classes; lenient mode counts the former as false positives and
  /// drops the latter.
  bool strict = true;
  std::vector<std::string> classes = default_class_names();
  /// Worker threads for per-image matching. Output does not depend on it.
  unsigned threads = 1;
};

struct ClassResult {
  std::string name;
  double ap = 0.0;
  std::size_t gt_count = 0;
  std::size_t det_count = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct EvalReport {
  std::vector<ClassResult> classes;
  double map = 0.0;
  double iou_thresh = 0.5;
  ApMode ap_mode = ApMode::kAllPoints;
  /// Lenient mode only: detections whose image has no ground truth.
  std::size_t unknown_image_dets = 0;
  /// Lenient mode only: records dropped for an unlisted class.
  std::size_t skipped_records = 0;

  const ClassResult* find(const std::string& name) const;
};

EvalReport evaluate(std::span<const DetectionRecord> dets,
                    std::span<const GroundTruthRecord> gts,
                    const EvalConfig& config = {});

/// Pretty-printed JSON with a fixed key order.
std::string report_json(const EvalReport& report);

/// One column per class plus mAP, AP as percentages.
std::string report_table(const EvalReport& report);

/// Two-column (method, mAP) table over several labelled runs.
std::string ablation_table(
    std::span<const std::pair<std::string, EvalReport>> runs);

}  // namespace obbkit
