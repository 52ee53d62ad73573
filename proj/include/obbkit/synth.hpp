// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obbkit/image.hpp"
#include "obbkit/random.hpp"
#include "obbkit/records.hpp"

namespace obbkit {

enum class SceneLayout {
  /// Independently placed, non-overlapping ships.
  kSparse,
  /// Rows of parallel ships moored side by side.
  kHarborRows,
};

struct SceneConfig {
  std::size_t image_w = 800;
  std::size_t image_h = 800;
  std::size_t ship_count = 12;
  /// Mean length:beam ratio.
  double aspect_mean = 6.0;
  /// Relative standard deviation of the aspect ratio.
  double aspect_jitter = 0.05;
  /// Ship lengths are uniform on [min, max] pixels.
  double length_min = 60.0;
  double length_max = 160.0;
  SceneLayout layout = SceneLayout::kSparse;
  std::size_t class_count = 7;
  std::uint64_t seed = 0;
  std::string image_id = "img_0000";
  /// Skip rasterization when only the records are needed.
  bool render = true;
};

struct Scene {
  ImageRaster image;
  std::vector<GroundTruthRecord> records;
};

/// Ships never overlap and lie fully inside the image. In harbor rows the gap
/// between neighbours in a row is at most 0.3 of the thinner beam. Classes
/// are assigned round-robin. Throws PlacementError after 1000 failed
/// placement attempts for one ship (or row).
Scene gen_scene(const SceneConfig& config);

struct CorruptionConfig {
  double center_std = 2.0;  ///< pixels
  double angle_std = 0.02;  ///< radians
  double size_std = 0.03;   ///< multiplicative, applied as exp(size_std * z)
  double fn_rate = 0.1;
  /// Each ground truth spawns a spurious detection with this probability.
  double fp_rate = 0.1;
  double tp_score_mean = 0.8;
  double fp_score_mean = 0.3;
  double score_std = 0.1;
  /// Extent used to place spurious boxes.
  double image_w = 800.0;
  double image_h = 800.0;
  std::uint64_t seed = 0;
};

/// Stand-in for a detector: drops, jitters and scores ground truths, then
/// appends spurious boxes.
std::vector<DetectionRecord> corrupt(std::span<const GroundTruthRecord> gts,
                                     const CorruptionConfig& config);

/// Seeded shuffle followed by a cut at
/// round_half_up(n * ratio_train / (ratio_train + ratio_test)).
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::vector<T> items,
                                                std::uint64_t ratio_train,
                                                std::uint64_t ratio_test,
                                                std::uint64_t seed);

std::size_t train_count(std::size_t n, std::uint64_t ratio_train,
                        std::uint64_t ratio_test);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::vector<T> items,
                                                std::uint64_t ratio_train,
                                                std::uint64_t ratio_test,
                                                std::uint64_t seed) {
  const std::size_t cut = train_count(items.size(), ratio_train, ratio_test);
  const std::vector<std::size_t> order = shuffled_indices(items.size(), seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(cut);
  out.second.reserve(items.size() - cut);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? out.first : out.second).push_back(std::move(items[order[i]]));
  }
  return out;
}

}  // namespace obbkit
