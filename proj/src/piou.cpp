// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/piou.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "obbkit/error.hpp"

namespace obbkit {

namespace {

constexpr double kMaxSamples = 4e9;
constexpr double kCutoff = 40.0;

void validate(const RasterSpec& spec) {
  if (!std::isfinite(spec.step) || !(spec.step > 0.0)) {
    throw InvalidSpecError("raster step must be finite and positive");
  }
}

void validate(const SoftKernelParams& kp) {
  if (!std::isfinite(kp.k) || !(kp.k > 0.0)) {
    throw InvalidSpecError("kernel steepness k must be finite and positive");
  }
}

SampleGrid make_grid(double min_x, double min_y, double max_x, double max_y,
                     double step) {
  SampleGrid g;
  g.x0 = min_x;
  g.y0 = min_y;
  g.step = step;
  const double nx = std::ceil((max_x - min_x) / step);
  const double ny = std::ceil((max_y - min_y) / step);
  if (!(nx * ny <= kMaxSamples)) {
    throw InvalidSpecError("raster step too small for the boxes involved");
  }
  g.nx = static_cast<std::size_t>(std::max(nx, 1.0));
  g.ny = static_cast<std::size_t>(std::max(ny, 1.0));
  return g;
}

// Box-frame coordinates (u along w, v along h) of image points.
struct Frame {
  double cx, cy, c, s, half_w, half_h;

  explicit Frame(const OrientedBox& b)
      : cx(b.cx),
        cy(b.cy),
        c(std::cos(b.theta)),
        s(std::sin(b.theta)),
        half_w(0.5 * b.w),
        half_h(0.5 * b.h) {}

  double u(double x, double y) const { return (x - cx) * c + (y - cy) * s; }
  double v(double x, double y) const { return -(x - cx) * s + (y - cy) * c; }
  bool inside(double x, double y) const {
    return std::abs(u(x, y)) <= half_w && std::abs(v(x, y)) <= half_h;
  }
};

double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Grid indices whose sample coordinate lies within [lo, hi].
std::pair<std::size_t, std::size_t> index_range(double lo, double hi,
                                                double origin, double step,
                                                std::size_t n) {
  const double first = std::ceil((lo - origin) / step - 0.5);
  const double last = std::floor((hi - origin) / step - 0.5);
  const double nd = static_cast<double>(n);
  const double begin = std::clamp(first, 0.0, nd);
  const double end = std::clamp(last + 1.0, 0.0, nd);
  if (end <= begin) return {0, 0};
  return {static_cast<std::size_t>(begin), static_cast<std::size_t>(end)};
}

}  // namespace

SampleGrid SampleGrid::for_pair(const OrientedBox& a, const OrientedBox& b,
                                const RasterSpec& spec) {
  validate(a);
  validate(b);
  validate(spec);
  const auto ha = axis_aligned_hull(a);
  const auto hb = axis_aligned_hull(b);
  return make_grid(std::min(ha[0], hb[0]) - spec.step,
                   std::min(ha[1], hb[1]) - spec.step,
                   std::max(ha[2], hb[2]) + spec.step,
                   std::max(ha[3], hb[3]) + spec.step, spec.step);
}

SampleGrid SampleGrid::for_target(const OrientedBox& target,
                                  const RasterSpec& spec) {
  validate(target);
  validate(spec);
  const auto h = axis_aligned_hull(target);
  const double mx = 0.5 * (h[2] - h[0]);
  const double my = 0.5 * (h[3] - h[1]);
  return make_grid(h[0] - mx, h[1] - my, h[2] + mx, h[3] + my, spec.step);
}

HardCounts piou_hard_counts(const OrientedBox& a, const OrientedBox& b,
                            const SampleGrid& grid) {
  validate(a);
  validate(b);
  const Frame fa(a);
  const Frame fb(b);
  HardCounts counts;
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double y = grid.y(j);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const bool in_a = fa.inside(x, y);
      const bool in_b = fb.inside(x, y);
      counts.intersection += (in_a && in_b) ? 1 : 0;
      counts.union_count += (in_a || in_b) ? 1 : 0;
    }
  }
  return counts;
}

double piou_hard(const OrientedBox& a, const OrientedBox& b,
                 const RasterSpec& spec) {
  const SampleGrid grid = SampleGrid::for_pair(a, b, spec);
  const HardCounts counts = piou_hard_counts(a, b, grid);
  if (counts.union_count == 0) {
    throw DegenerateRasterError("no raster sample falls inside either box");
  }
  return static_cast<double>(counts.intersection) /
         static_cast<double>(counts.union_count);
}

double piou_soft_log_on_grid(const OrientedBox& a, const OrientedBox& b,
                             const SampleGrid& grid,
                             const SoftKernelParams& kp) {
  validate(a);
  validate(b);
  validate(kp);
  const Frame fa(a);
  const Frame fb(b);
  const double k = kp.k;

  // Intersection accumulated as a streaming log-sum-exp so that it never
  // underflows; the union is bounded below by the box interiors.
  double lse_max = -std::numeric_limits<double>::infinity();
  double lse_sum = 0.0;
  double uni = 0.0;
  std::size_t hard_union = 0;

  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double y = grid.y(j);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const double ua = fa.u(x, y), va = fa.v(x, y);
      const double ub = fb.u(x, y), vb = fb.v(x, y);
      const double la = log_sigmoid(k * (fa.half_w - std::abs(ua))) +
                        log_sigmoid(k * (fa.half_h - std::abs(va)));
      const double lb = log_sigmoid(k * (fb.half_w - std::abs(ub))) +
                        log_sigmoid(k * (fb.half_h - std::abs(vb)));
      const double ma = std::exp(la);
      const double mb = std::exp(lb);
      uni += ma + mb - ma * mb;

      const double lab = la + lb;
      if (lab > lse_max) {
        lse_sum = lse_sum * std::exp(lse_max - lab) + 1.0;
        lse_max = lab;
      } else {
        lse_sum += std::exp(lab - lse_max);
      }
      if ((std::abs(ua) <= fa.half_w && std::abs(va) <= fa.half_h) ||
          (std::abs(ub) <= fb.half_w && std::abs(vb) <= fb.half_h)) {
        ++hard_union;
      }
    }
  }
  if (hard_union == 0 || !(uni > 0.0)) {
    throw DegenerateRasterError("no raster sample falls inside either box");
  }
  const double log_inter = lse_max + std::log(lse_sum);
  return std::min(log_inter - std::log(uni), 0.0);
}

double piou_soft_log(const OrientedBox& a, const OrientedBox& b,
                     const RasterSpec& spec, const SoftKernelParams& kp) {
  return piou_soft_log_on_grid(a, b, SampleGrid::for_pair(a, b, spec), kp);
}

double piou_soft(const OrientedBox& a, const OrientedBox& b,
                 const RasterSpec& spec, const SoftKernelParams& kp) {
  return std::exp(piou_soft_log(a, b, spec, kp));
}

double piou_loss(std::span<const std::pair<OrientedBox, OrientedBox>> pairs,
                 const PiouLossOptions& options) {
  if (pairs.empty()) {
    throw EmptySetError("PIoU loss needs at least one positive pair");
  }
  if (!(options.hard_clamp > 0.0) || !(options.hard_clamp <= 1.0)) {
    throw InvalidSpecError("hard clamp must lie in (0, 1]");
  }
  double sum = 0.0;
  for (const auto& [pred, target] : pairs) {
    if (options.variant == PiouVariant::kHard) {
      const double p = piou_hard(pred, target, options.raster);
      sum += -std::log(std::max(p, options.hard_clamp));
    } else {
      sum += -piou_soft_log(pred, target, options.raster, options.kernel);
    }
  }
  return sum / static_cast<double>(pairs.size());
}

SoftLossAndGradient piou_soft_loss_and_grad_on_grid(
    const OrientedBox& pred, const OrientedBox& target, const SampleGrid& grid,
    const SoftKernelParams& kp) {
  validate(pred);
  validate(target);
  validate(kp);
  const Frame fp(pred);
  const Frame ft(target);
  const double k = kp.k;

  double inter = 0.0;
  double uni = 0.0;
  BoxGradient d_inter{};
  BoxGradient d_uni{};

  // Samples farther than kCutoff / k from both boxes carry memberships below
  // e^-kCutoff and are skipped.
  const auto hp = axis_aligned_hull(pred);
  const auto ht = axis_aligned_hull(target);
  const double margin = kCutoff / k;
  const auto [i0, i1] = index_range(std::min(hp[0], ht[0]) - margin,
                                    std::max(hp[2], ht[2]) + margin, grid.x0,
                                    grid.step, grid.nx);
  const auto [j0, j1] = index_range(std::min(hp[1], ht[1]) - margin,
                                    std::max(hp[3], ht[3]) + margin, grid.y0,
                                    grid.step, grid.ny);

  for (std::size_t j = j0; j < j1; ++j) {
    const double y = grid.y(j);
    for (std::size_t i = i0; i < i1; ++i) {
      const double x = grid.x(i);
      const double mt = sigmoid(k * (ft.half_w - std::abs(ft.u(x, y)))) *
                        sigmoid(k * (ft.half_h - std::abs(ft.v(x, y))));

      const double u = fp.u(x, y);
      const double v = fp.v(x, y);
      const double za = k * (fp.half_w - std::abs(u));
      const double zb = k * (fp.half_h - std::abs(v));
      const double a = sigmoid(za);
      const double b = sigmoid(zb);
      const double m = a * b;
      inter += m * mt;
      uni += m + mt - m * mt;

      // d(sigmoid(z))/dz = sigmoid(z) sigmoid(-z), scaled by k.
      const double ga = k * a * sigmoid(-za) * b;
      const double gb = k * b * sigmoid(-zb) * a;
      const double su = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
      const double sv = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);

      const BoxGradient dm{
          ga * su * fp.c - gb * sv * fp.s,
          ga * su * fp.s + gb * sv * fp.c,
          0.5 * ga,
          0.5 * gb,
          -ga * su * v + gb * sv * u,
      };
      for (std::size_t p = 0; p < 5; ++p) {
        d_inter[p] += mt * dm[p];
        d_uni[p] += (1.0 - mt) * dm[p];
      }
    }
  }
  if (!(inter > 0.0) || !std::isfinite(inter) || !(uni > 0.0)) {
    throw DegenerateRasterError(
        "soft intersection underflows on the gradient grid");
  }
  SoftLossAndGradient out;
  out.loss = -std::log(inter / uni);
  for (std::size_t p = 0; p < 5; ++p) {
    out.grad[p] = -d_inter[p] / inter + d_uni[p] / uni;
  }
  return out;
}

BoxGradient piou_soft_grad(const OrientedBox& pred, const OrientedBox& target,
                           const RasterSpec& spec, const SoftKernelParams& kp) {
  return piou_soft_loss_and_grad_on_grid(
             pred, target, SampleGrid::for_target(target, spec), kp)
      .grad;
}

}  // namespace obbkit
