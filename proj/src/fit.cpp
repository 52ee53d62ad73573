// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "obbkit/error.hpp"
#include "obbkit/records.hpp"

namespace obbkit {

namespace {

void validate(const OptimizerConfig& cfg) {
  if (!(cfg.base_lr > 0.0) || !std::isfinite(cfg.base_lr)) {
    throw InvalidSpecError("learning rate must be positive");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw InvalidSpecError("momentum must lie in [0, 1)");
  }
  if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay)) {
    throw InvalidSpecError("weight decay must be non-negative");
  }
  for (double s : cfg.param_scale) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidSpecError("parameter scales must be non-negative");
    }
  }
  if (!(cfg.min_extent > 0.0)) {
    throw InvalidSpecError("minimum extent must be positive");
  }
}

}  // namespace

BoxParams to_params(const OrientedBox& box) {
  return {box.cx, box.cy, box.w, box.h, box.theta};
}

OrientedBox from_params(const BoxParams& p) {
  return {p[0], p[1], p[2], p[3], p[4]};
}

double warmup_lr(std::size_t step, const OptimizerConfig& cfg) {
  if (step < cfg.warmup_steps) {
    return cfg.base_lr * static_cast<double>(step + 1) /
           static_cast<double>(cfg.warmup_steps);
  }
  return cfg.base_lr;
}

SgdState sgd_step(const BoxParams& params, const BoxParams& grads,
                  const BoxParams& velocity, double lr,
                  const OptimizerConfig& cfg) {
  SgdState out;
  for (std::size_t i = 0; i < 5; ++i) {
    if (!std::isfinite(grads[i])) {
      throw DivergenceError("non-finite gradient component " + std::to_string(i));
    }
    out.velocity[i] =
        cfg.momentum * velocity[i] + grads[i] + cfg.weight_decay * params[i];
    out.params[i] = params[i] - lr * cfg.param_scale[i] * out.velocity[i];
    if (!std::isfinite(out.params[i])) {
      throw DivergenceError("parameter " + std::to_string(i) + " diverged");
    }
  }
  out.params[2] = std::max(out.params[2], cfg.min_extent);
  out.params[3] = std::max(out.params[3], cfg.min_extent);
  return out;
}

FitTrajectory fit_box(const OrientedBox& init, const OrientedBox& target,
                      const OptimizerConfig& cfg,
                      const SoftKernelParams& kernel) {
  validate(cfg);
  validate(init);
  validate(target);
  const SampleGrid grid = SampleGrid::for_target(target, cfg.raster);

  SgdState state{to_params(init), {}};
  FitTrajectory traj;
  for (std::size_t step = 0;; ++step) {
    const OrientedBox box = from_params(state.params);
    SoftLossAndGradient eval;
    try {
      eval = piou_soft_loss_and_grad_on_grid(box, target, grid, kernel);
    } catch (const DegenerateRasterError&) {
      if (step == 0) {
        throw InvalidSpecError("initial box does not overlap the target's grid");
      }
      throw DivergenceError("box left the target's sample grid");
    }
    if (step == 0 && !(std::exp(-eval.loss) > 1e-6)) {
      throw InvalidSpecError("initial soft PIoU must exceed 1e-6");
    }
    const double lr = warmup_lr(step, cfg);
    const double iou = skew_iou(box, target);
    traj.steps.push_back({step, box, eval.loss, iou, lr});
    if (iou >= cfg.stop_iou || step >= cfg.max_steps) break;
    state = sgd_step(state.params, eval.grad, state.velocity, lr, cfg);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const FitTrajectory& trajectory) {
  out << "step,cx,cy,w,h,theta,loss,iou,lr\n";
  char line[320];
  for (const FitStep& s : trajectory.steps) {
    std::snprintf(line, sizeof(line),
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  s.step, s.box.cx, s.box.cy, s.box.w, s.box.h,
                  rad_to_deg(s.box.theta), s.loss, s.iou, s.lr);
    out << line;
  }
}

}  // namespace obbkit
