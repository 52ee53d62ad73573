// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/fit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "obbkit/error.hpp"
#include "obbkit/random.hpp"

namespace obbkit {
namespace {

const OrientedBox kTarget{100, 100, 60, 10, 0.3};
const OrientedBox kStart{108, 108, 72, 12, 0.45};

OrientedBox perturbed_start(Rng& rng, const OrientedBox& t) {
  for (;;) {
    const OrientedBox s{t.cx + rng.uniform(-10, 10), t.cy + rng.uniform(-10, 10),
                        t.w * rng.uniform(0.7, 1.4), t.h * rng.uniform(0.7, 1.4),
                        t.theta + rng.uniform(-0.5, 0.5)};
    if (skew_iou(s, t) >= 0.2) return s;
  }
}

TEST(WarmupLr, LinearRampThenConstant) {
  const OptimizerConfig cfg;
  EXPECT_DOUBLE_EQ(warmup_lr(0, cfg), 0.0002);
  EXPECT_DOUBLE_EQ(warmup_lr(2, cfg), 0.0006);
  EXPECT_DOUBLE_EQ(warmup_lr(4, cfg), 0.001);
  EXPECT_DOUBLE_EQ(warmup_lr(5, cfg), 0.001);
  EXPECT_DOUBLE_EQ(warmup_lr(100, cfg), 0.001);
  OptimizerConfig none;
  none.warmup_steps = 0;
  EXPECT_DOUBLE_EQ(warmup_lr(0, none), 0.001);
}

TEST(SgdStep, ZeroGradientIsFixedPoint) {
  const OptimizerConfig cfg;
  const BoxParams p{1, 2, 30, 5, 0.2};
  const SgdState s = sgd_step(p, {}, {}, 0.001, cfg);
  EXPECT_EQ(s.params, p);
  EXPECT_EQ(s.velocity, (BoxParams{}));
}

TEST(SgdStep, FirstStepIsScaledGradient) {
  const OptimizerConfig cfg;
  const BoxParams p{1, 2, 30, 5, 0.2};
  const BoxParams g{0.5, -0.25, 0.1, -0.2, 3.0};
  const double lr = 0.001;
  const SgdState s = sgd_step(p, g, {}, lr, cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(s.params[i], p[i] - lr * cfg.param_scale[i] * g[i]);
    EXPECT_EQ(s.velocity[i], g[i]);
  }
}

TEST(SgdStep, TwoStepMomentumRecursion) {
  OptimizerConfig cfg;
  cfg.param_scale = {1, 1, 1, 1, 1};
  const BoxParams p{0, 0, 10, 10, 0};
  const BoxParams g{1, -2, 0.5, 0.25, 0.1};
  const double lr = 0.01, mu = cfg.momentum;
  const SgdState s1 = sgd_step(p, g, {}, lr, cfg);
  const SgdState s2 = sgd_step(s1.params, g, s1.velocity, lr, cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(s2.velocity[i], (1 + mu) * g[i], 1e-15);
    EXPECT_NEAR(s2.params[i], p[i] - lr * (2 + mu) * g[i], 1e-12);
  }
}

TEST(SgdStep, WeightDecayAddsToVelocity) {
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0001;
  cfg.param_scale = {1, 1, 1, 1, 1};
  const BoxParams p{100, 50, 20, 4, 1};
  const SgdState s = sgd_step(p, {}, {}, 0.1, cfg);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(s.velocity[i], 0.0001 * p[i]);
  }
}

TEST(SgdStep, ClampsExtentsAndRejectsNonFinite) {
  const OptimizerConfig cfg;
  const SgdState s = sgd_step({0, 0, 2, 2, 0}, {0, 0, 100, 100, 0}, {}, 1.0, cfg);
  EXPECT_EQ(s.params[2], 1.0);
  EXPECT_EQ(s.params[3], 1.0);
  EXPECT_THROW(sgd_step({0, 0, 2, 2, 0}, {std::nan(""), 0, 0, 0, 0}, {}, 0.1, cfg),
               DivergenceError);
  EXPECT_THROW(sgd_step({0, 0, 2, 2, 0}, {1e308, 0, 0, 0, 0}, {1e308, 0, 0, 0, 0}, 1e3, cfg),
               DivergenceError);
}

TEST(FitBox, StartingAtTargetStopsImmediately) {
  const FitTrajectory t = fit_box(kTarget, kTarget);
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.first().step, 0u);
  EXPECT_EQ(t.first().iou, 1.0);
}

TEST(FitBox, SixToOneTargetConverges) {
  OptimizerConfig cfg;
  cfg.stop_iou = 0.9;
  const FitTrajectory t = fit_box(kStart, kTarget, cfg);
  EXPECT_GE(t.last().iou, 0.9);
  // Regression bound from the current implementation (182 steps).
  EXPECT_LE(t.last().step, 190u);
  EXPECT_LT(t.first().iou, 0.6);
  EXPECT_LT(t.last().loss, t.first().loss);
}

TEST(FitBox, TrajectoryBookkeeping) {
  OptimizerConfig cfg;
  cfg.max_steps = 40;
  const FitTrajectory t = fit_box(kStart, kTarget, cfg);
  ASSERT_EQ(t.steps.size(), 41u);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    EXPECT_EQ(t.steps[i].step, i);
    EXPECT_EQ(t.steps[i].lr, warmup_lr(i, cfg));
    EXPECT_EQ(t.steps[i].iou, skew_iou(t.steps[i].box, kTarget));
  }
  EXPECT_EQ(t.first().box, kStart);
}

TEST(FitBox, Deterministic) {
  OptimizerConfig cfg;
  cfg.max_steps = 30;
  std::ostringstream a, b;
  write_trajectory_csv(a, fit_box(kStart, kTarget, cfg));
  write_trajectory_csv(b, fit_box(kStart, kTarget, cfg));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("step,cx,cy,w,h,theta,loss,iou,lr\n", 0), 0u);
}

TEST(FitBox, UsesTheAnalyticGradient) {
  OptimizerConfig cfg;
  cfg.max_steps = 1;
  cfg.momentum = 0.0;
  const FitTrajectory t = fit_box(kStart, kTarget, cfg);
  const BoxGradient g = piou_soft_grad(kStart, kTarget, cfg.raster, {});
  const BoxParams p0 = to_params(kStart);
  const BoxParams p1 = to_params(t.steps[1].box);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(p1[i], p0[i] - warmup_lr(0, cfg) * cfg.param_scale[i] * g[i]);
  }
  const SampleGrid grid = SampleGrid::for_target(kTarget, cfg.raster);
  EXPECT_NEAR(t.first().loss, -piou_soft_log_on_grid(kStart, kTarget, grid, {}), 1e-9);
}

TEST(FitBox, SmallStepsDescend) {
  Rng rng(61);
  OptimizerConfig cfg;
  cfg.momentum = 0.0;
  const double lr = cfg.base_lr / 10.0;
  const SampleGrid grid = SampleGrid::for_target(kTarget, cfg.raster);
  for (int i = 0; i < 100; ++i) {
    const OrientedBox s = perturbed_start(rng, kTarget);
    const auto here = piou_soft_loss_and_grad_on_grid(s, kTarget, grid, {});
    const SgdState next = sgd_step(to_params(s), here.grad, {}, lr, cfg);
    const double after =
        piou_soft_loss_and_grad_on_grid(from_params(next.params), kTarget, grid, {}).loss;
    EXPECT_LE(after, here.loss) << i;
  }
}

TEST(FitBox, RandomStartsReduceLoss) {
  Rng rng(60);
  OptimizerConfig cfg;
  cfg.max_steps = 60;
  for (int i = 0; i < 10; ++i) {
    const FitTrajectory t = fit_box(perturbed_start(rng, kTarget), kTarget, cfg);
    EXPECT_LT(t.last().loss, t.first().loss) << i;
    EXPECT_LE(t.steps.size(), cfg.max_steps + 1);
  }
}

TEST(FitBox, RejectsStartsOutsideTheGrid) {
  EXPECT_THROW(fit_box({400, 400, 60, 10, 0.3}, kTarget), InvalidSpecError);
  OptimizerConfig bad;
  bad.momentum = 1.0;
  EXPECT_THROW(fit_box(kStart, kTarget, bad), InvalidSpecError);
}

TEST(TrajectoryCsv, DegreesAndRowCount) {
  FitTrajectory t;
  t.steps.push_back({0, {1, 2, 3, 4, kPi / 2}, 0.5, 0.25, 0.0002});
  std::ostringstream out;
  write_trajectory_csv(out, t);
  EXPECT_EQ(out.str(), "step,cx,cy,w,h,theta,loss,iou,lr\n0,1,2,3,4,90,0.5,0.25,0.00020000000000000001\n");
}

}  // namespace
}  // namespace obbkit
