// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obbkit/error.hpp"
#include "obbkit/geometry.hpp"

namespace obbkit {

namespace {

constexpr int kMaxAttempts = 1000;
constexpr double kBackground = 0.08;
constexpr double kNoise = 0.02;

// Stream ids derived from the scene seed.
constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kRenderStream = 2;

void validate(const SceneConfig& c) {
  if (c.image_w == 0 || c.image_h == 0 || c.ship_count == 0) {
    throw InvalidSpecError("scene dimensions and ship count must be positive");
  }
  if (!(c.aspect_mean > 1.0) || !std::isfinite(c.aspect_mean)) {
    throw InvalidSpecError("aspect_mean must exceed 1");
  }
  if (!(c.aspect_jitter >= 0.0) || !std::isfinite(c.aspect_jitter)) {
    throw InvalidSpecError("aspect_jitter must be non-negative");
  }
  if (!(c.length_min > 0.0) || !(c.length_max >= c.length_min) ||
      !std::isfinite(c.length_max)) {
    throw InvalidSpecError("length range must satisfy 0 < min <= max");
  }
  if (c.class_count == 0 || c.class_count > kShipClasses.size()) {
    throw InvalidSpecError("class_count must lie in [1, 7]");
  }
  if (c.image_id.empty()) throw InvalidSpecError("image_id must be non-empty");
}

void validate(const CorruptionConfig& c) {
  const auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  const auto std_ok = [](double s) { return s >= 0.0 && std::isfinite(s); };
  if (!rate_ok(c.fn_rate) || !rate_ok(c.fp_rate)) {
    throw InvalidSpecError("corruption rates must lie in [0, 1]");
  }
  if (!std_ok(c.center_std) || !std_ok(c.angle_std) || !std_ok(c.size_std) ||
      !std_ok(c.score_std)) {
    throw InvalidSpecError("corruption standard deviations must be >= 0");
  }
  if (!(c.image_w > 0.0) || !(c.image_h > 0.0)) {
    throw InvalidSpecError("corruption image extent must be positive");
  }
}

struct Hull {
  double w;
  double h;
};

// Length and beam of one ship.
Hull sample_size(Rng& rng, const SceneConfig& c) {
  const double length = rng.uniform(c.length_min, c.length_max);
  const double aspect =
      std::max(1.01, c.aspect_mean * (1.0 + c.aspect_jitter * rng.normal()));
  return {length, length / aspect};
}

bool inside_image(const OrientedBox& b, const SceneConfig& c) {
  const auto h = axis_aligned_hull(b);
  return h[0] >= 0.0 && h[1] >= 0.0 && h[2] <= static_cast<double>(c.image_w) &&
         h[3] <= static_cast<double>(c.image_h);
}

bool overlaps_any(const OrientedBox& b, const std::vector<OrientedBox>& placed) {
  return std::any_of(placed.begin(), placed.end(), [&](const OrientedBox& p) {
    return skew_iou(b, p) > 0.0;
  });
}

double random_angle(Rng& rng) { return wrap_half_pi(rng.uniform(-kPi / 2, kPi / 2)); }

void place_sparse(Rng& rng, const SceneConfig& c, std::vector<OrientedBox>& out) {
  for (std::size_t i = 0; i < c.ship_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const Hull size = sample_size(rng, c);
      const OrientedBox box{rng.uniform(0.0, static_cast<double>(c.image_w)),
                            rng.uniform(0.0, static_cast<double>(c.image_h)),
                            size.w, size.h, random_angle(rng)};
      if (inside_image(box, c) && !overlaps_any(box, out)) {
        out.push_back(box);
        placed = true;
      }
    }
    if (!placed) {
      throw PlacementError("could not place ship " + std::to_string(i) +
                           " after 1000 attempts");
    }
  }
}

// Rows of parallel ships stacked along their beam direction, tilted away from
// the image axes so that axis-aligned hulls of neighbours collide.
void place_harbor_rows(Rng& rng, const SceneConfig& c,
                       std::vector<OrientedBox>& out) {
  while (out.size() < c.ship_count) {
    const std::size_t remaining = c.ship_count - out.size();
    const std::size_t row_n =
        std::min<std::size_t>(remaining, 3 + static_cast<std::size_t>(rng.below(4)));
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double theta = sign * rng.uniform(kPi / 8, 3 * kPi / 8);
      std::vector<Hull> sizes(row_n);
      for (auto& s : sizes) s = sample_size(rng, c);
      // Offsets along the beam axis of each ship center.
      std::vector<double> offset(row_n, 0.0);
      for (std::size_t i = 1; i < row_n; ++i) {
        const double gap =
            rng.uniform(0.1, 0.3) * std::min(sizes[i - 1].h, sizes[i].h);
        offset[i] = offset[i - 1] + 0.5 * sizes[i - 1].h + gap + 0.5 * sizes[i].h;
      }
      const double mid = 0.5 * offset.back();
      const double rx = rng.uniform(0.0, static_cast<double>(c.image_w));
      const double ry = rng.uniform(0.0, static_cast<double>(c.image_h));
      const Point u{std::cos(theta), std::sin(theta)};
      const Point v{-u.y, u.x};

      std::vector<OrientedBox> row;
      bool ok = true;
      for (std::size_t i = 0; i < row_n && ok; ++i) {
        const double along = rng.uniform(-0.05, 0.05) * sizes[i].w;
        const double across = offset[i] - mid;
        const OrientedBox box{rx + along * u.x + across * v.x,
                              ry + along * u.y + across * v.y, sizes[i].w,
                              sizes[i].h, theta};
        ok = inside_image(box, c) && !overlaps_any(box, out);
        row.push_back(box);
      }
      if (ok) {
        out.insert(out.end(), row.begin(), row.end());
        placed = true;
      }
    }
    if (!placed) {
      throw PlacementError("could not place a harbor row after 1000 attempts");
    }
  }
}

ImageRaster render(const SceneConfig& c, const std::vector<OrientedBox>& boxes,
                   const std::vector<std::size_t>& class_of, Rng rng) {
  const std::size_t channels = 3;
  std::vector<double> gray(c.image_w * c.image_h, kBackground);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const double level = 0.3 + 0.1 * static_cast<double>(class_of[b]);
    const auto hull = axis_aligned_hull(boxes[b]);
    const auto r0 = static_cast<std::size_t>(std::max(0.0, std::floor(hull[1])));
    const auto r1 = static_cast<std::size_t>(
        std::min(static_cast<double>(c.image_h), std::ceil(hull[3])));
    const auto c0 = static_cast<std::size_t>(std::max(0.0, std::floor(hull[0])));
    const auto c1 = static_cast<std::size_t>(
        std::min(static_cast<double>(c.image_w), std::ceil(hull[2])));
    for (std::size_t r = r0; r < r1; ++r) {
      for (std::size_t col = c0; col < c1; ++col) {
        const Point p{static_cast<double>(col) + 0.5, static_cast<double>(r) + 0.5};
        if (contains(boxes[b], p)) gray[r * c.image_w + col] = level;
      }
    }
  }
  std::vector<double> samples(gray.size() * channels);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    for (std::size_t ch = 0; ch < channels; ++ch) {
      samples[i * channels + ch] =
          std::clamp(gray[i] + rng.uniform(-kNoise, kNoise), 0.0, 1.0);
    }
  }
  return ImageRaster(c.image_w, c.image_h, channels, std::move(samples));
}

}  // namespace

Scene gen_scene(const SceneConfig& config) {
  validate(config);
  const Rng root(config.seed);
  Rng placement = root.split(kPlacementStream);

  std::vector<OrientedBox> boxes;
  boxes.reserve(config.ship_count);
  if (config.layout == SceneLayout::kSparse) {
    place_sparse(placement, config, boxes);
  } else {
    place_harbor_rows(placement, config, boxes);
  }

  Scene scene;
  std::vector<std::size_t> class_of(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    class_of[i] = i % config.class_count;
    scene.records.push_back({config.image_id,
                             std::string(kShipClasses[class_of[i]]), boxes[i]});
  }
  if (config.render) {
    scene.image = render(config, boxes, class_of, root.split(kRenderStream));
  }
  return scene;
}

std::vector<DetectionRecord> corrupt(std::span<const GroundTruthRecord> gts,
                                     const CorruptionConfig& config) {
  validate(config);
  const Rng root(config.seed);
  std::vector<DetectionRecord> kept;
  std::vector<DetectionRecord> spurious;
  auto score = [&](Rng& rng, double mean) {
    return std::clamp(rng.normal(mean, config.score_std), 0.0, 1.0);
  };

  for (std::size_t i = 0; i < gts.size(); ++i) {
    // Every record draws from its own stream, so outcomes for one record never
    // shift the randomness of another.
    Rng rng = root.split(i);
    const GroundTruthRecord& gt = gts[i];
    validate(gt.box);
    if (!rng.bernoulli(config.fn_rate)) {
      OrientedBox b = gt.box;
      b.cx += config.center_std * rng.normal();
      b.cy += config.center_std * rng.normal();
      b.w *= std::exp(config.size_std * rng.normal());
      b.h *= std::exp(config.size_std * rng.normal());
      b.theta += config.angle_std * rng.normal();
      kept.push_back({gt.image_id, gt.class_label, b,
                      score(rng, config.tp_score_mean)});
    }
    if (rng.bernoulli(config.fp_rate)) {
      const double length = rng.uniform(40.0, 160.0);
      const OrientedBox b{rng.uniform(0.0, config.image_w),
                          rng.uniform(0.0, config.image_h), length,
                          length / 6.0, rng.uniform(-kPi / 2, kPi / 2)};
      const auto cls = kShipClasses[rng.below(kShipClasses.size())];
      spurious.push_back({gt.image_id, std::string(cls), b,
                          score(rng, config.fp_score_mean)});
    }
  }
  kept.insert(kept.end(), spurious.begin(), spurious.end());
  return kept;
}

std::size_t train_count(std::size_t n, std::uint64_t ratio_train,
                        std::uint64_t ratio_test) {
  if (ratio_train == 0 || ratio_test == 0) {
    throw InvalidSpecError("split ratios must be positive integers");
  }
  const std::uint64_t total = ratio_train + ratio_test;
  // round_half_up(n * train / total) in exact integer arithmetic.
  return static_cast<std::size_t>((2 * n * ratio_train + total) / (2 * total));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace obbkit
