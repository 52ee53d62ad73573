// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "obbkit/geometry.hpp"
#include "obbkit/piou.hpp"

namespace obbkit {

/// Parameter order everywhere below: (cx, cy, w, h, theta).
using BoxParams = std::array<double, 5>;

BoxParams to_params(const OrientedBox& box);
OrientedBox from_params(const BoxParams& p);

/// Momentum SGD with a linear warm-up.
struct OptimizerConfig {
  double base_lr = 0.001;
  double momentum = 0.9;
  /// 0.0001 reproduces the network-training value; decaying box coordinates
  /// toward the origin has no geometric meaning, so it is off by default.
  double weight_decay = 0.0;
  std::size_t warmup_steps = 5;
  std::size_t max_steps = 500;
  /// Per-component multiplier on the update. Pixel components are large
  /// because -ln PIoU gradients shrink like 1/size.
  BoxParams param_scale{400.0, 400.0, 400.0, 400.0, 0.1};
  /// Stop once skew IoU with the target reaches this value.
  double stop_iou = 0.95;
  /// Sampling grid of the soft PIoU objective.
  RasterSpec raster{0.25};
  /// Lower bound on w and h after each update.
  double min_extent = 1.0;
};

/// base_lr * (step + 1) / warmup_steps during warm-up, base_lr afterwards.
double warmup_lr(std::size_t step, const OptimizerConfig& cfg);

struct SgdState {
  BoxParams params{};
  BoxParams velocity{};
};

/// v' = momentum * v + g + weight_decay * p;  p' = p - lr * scale * v'.
/// Extents are clamped to cfg.min_extent afterwards. Throws DivergenceError on
/// a non-finite gradient or result.
SgdState sgd_step(const BoxParams& params, const BoxParams& grads,
                  const BoxParams& velocity, double lr,
                  const OptimizerConfig& cfg);

struct FitStep {
  std::size_t step = 0;
  OrientedBox box;
  double loss = 0.0;
  double iou = 0.0;
  /// warmup_lr(step): the rate used to leave this state.
  double lr = 0.0;
};

struct FitTrajectory {
  std::vector<FitStep> steps;

  const FitStep& first() const { return steps.front(); }
  const FitStep& last() const { return steps.back(); }
};

/// Descends -ln soft PIoU(pred, target) from `init`, evaluated on the
/// target's fixed sample grid. The first entry is the initial state. Throws
/// InvalidSpecError when init and target do not interact (soft PIoU <= 1e-6).
FitTrajectory fit_box(const OrientedBox& init, const OrientedBox& target,
                      const OptimizerConfig& cfg = {},
                      const SoftKernelParams& kernel = {});

/// CSV with header step,cx,cy,w,h,theta,loss,iou,lr (theta in degrees).
void write_trajectory_csv(std::ostream& out, const FitTrajectory& trajectory);

}  // namespace obbkit
