// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>

#include "obbkit/geometry.hpp"

namespace obbkit {

/// Sample spacing, in pixels, of the PIoU grid.
struct RasterSpec {
  double step = 0.1;
};

/// Steepness of the sigmoid edge of the soft membership, per pixel.
struct SoftKernelParams {
  double k = 10.0;
};

/// Regular grid of sample points at cell centres:
/// x_i = x0 + (i + 0.5) * step, y_j = y0 + (j + 0.5) * step.
struct SampleGrid {
  double x0 = 0.0;
  double y0 = 0.0;
  double step = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;

  /// Covers the union of both boxes' axis-aligned hulls, expanded by one step.
  static SampleGrid for_pair(const OrientedBox& a, const OrientedBox& b,
                             const RasterSpec& spec);
  /// Covers `target`'s axis-aligned hull widened by half its size on every
  /// side. Independent of any predicted box, so sums over it are smooth in
  /// the prediction.
  static SampleGrid for_target(const OrientedBox& target,
                               const RasterSpec& spec);

  std::size_t size() const { return nx * ny; }
  double x(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * step; }
  double y(std::size_t j) const { return y0 + (static_cast<double>(j) + 0.5) * step; }
};

/// Sample counts behind a hard PIoU value.
struct HardCounts {
  std::size_t intersection = 0;
  std::size_t union_count = 0;
};

HardCounts piou_hard_counts(const OrientedBox& a, const OrientedBox& b,
                            const SampleGrid& grid);

/// Fraction of grid samples inside both boxes among those inside either.
/// Throws DegenerateRasterError when no sample falls inside either box.
double piou_hard(const OrientedBox& a, const OrientedBox& b,
                 const RasterSpec& spec);

/// Natural log of the soft PIoU, evaluated on `grid`. Finite for every pair
/// of valid boxes, however far apart.
double piou_soft_log_on_grid(const OrientedBox& a, const OrientedBox& b,
                             const SampleGrid& grid,
                             const SoftKernelParams& kp);

double piou_soft_log(const OrientedBox& a, const OrientedBox& b,
                     const RasterSpec& spec, const SoftKernelParams& kp);

/// Soft PIoU with membership
///   m(p) = sigmoid(k (w/2 - |u|)) * sigmoid(k (h/2 - |v|))
/// where (u, v) are p's coordinates in the box frame. exp() of
/// piou_soft_log; underflows to 0 only once the log drops below about -745.
double piou_soft(const OrientedBox& a, const OrientedBox& b,
                 const RasterSpec& spec, const SoftKernelParams& kp);

enum class PiouVariant { kHard, kSoft };

struct PiouLossOptions {
  PiouVariant variant = PiouVariant::kSoft;
  RasterSpec raster{};
  SoftKernelParams kernel{};
  /// Lower clamp applied to hard PIoU before the log.
  double hard_clamp = 1e-9;
};

/// Mean of -ln PIoU(pred, target) over the positive set. Throws EmptySetError
/// on an empty set.
double piou_loss(std::span<const std::pair<OrientedBox, OrientedBox>> pairs,
                 const PiouLossOptions& options = {});

/// Gradient order (cx, cy, w, h, theta).
using BoxGradient = std::array<double, 5>;

struct SoftLossAndGradient {
  double loss = 0.0;
  BoxGradient grad{};
};

/// -ln soft PIoU on a fixed grid and its analytic gradient with respect to
/// `pred`. Throws DegenerateRasterError when the soft intersection underflows.
SoftLossAndGradient piou_soft_loss_and_grad_on_grid(
    const OrientedBox& pred, const OrientedBox& target, const SampleGrid& grid,
    const SoftKernelParams& kp);

/// Gradient of -ln piou_soft(pred, target) over SampleGrid::for_target.
BoxGradient piou_soft_grad(const OrientedBox& pred, const OrientedBox& target,
                           const RasterSpec& spec, const SoftKernelParams& kp);

}  // namespace obbkit
