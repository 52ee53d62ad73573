// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/geometry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "obbkit/error.hpp"
#include "obbkit/random.hpp"
#include "test_support.hpp"

namespace obbkit {
namespace {

using testing::random_box;

bool has_vertex(const ConvexPolygon& poly, Point p, double tol = 1e-9) {
  return std::any_of(poly.vertices().begin(), poly.vertices().end(),
                     [&](Point q) {
                       return std::abs(q.x - p.x) <= tol && std::abs(q.y - p.y) <= tol;
                     });
}

void expect_box_near(const OrientedBox& got, const OrientedBox& want,
                     double tol = 1e-12) {
  EXPECT_NEAR(got.cx, want.cx, tol);
  EXPECT_NEAR(got.cy, want.cy, tol);
  EXPECT_NEAR(got.w, want.w, tol);
  EXPECT_NEAR(got.h, want.h, tol);
  EXPECT_NEAR(got.theta, want.theta, tol);
}

TEST(Canonicalize, AlreadyCanonical) {
  expect_box_near(canonicalize({0, 0, 2, 1, 0}), {0, 0, 2, 1, 0});
}

TEST(Canonicalize, HalfTurnPeriod) {
  expect_box_near(canonicalize({0, 0, 2, 1, kPi}), {0, 0, 2, 1, 0});
}

TEST(Canonicalize, SwapsExtentsToLongAxis) {
  expect_box_near(canonicalize({0, 0, 1, 2, 0}), {0, 0, 2, 1, kPi / 2});
}

TEST(Canonicalize, NegativeHalfPiMapsToPositive) {
  expect_box_near(canonicalize({3, 4, 5, 1, -kPi / 2}), {3, 4, 5, 1, kPi / 2});
}

TEST(Canonicalize, IdempotentAndSamePointSet) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    OrientedBox b = random_box(rng, 0.2, 5.0);
    b.theta = rng.uniform(-20.0, 20.0);
    const OrientedBox c = canonicalize(b);
    EXPECT_GT(c.theta, -kPi / 2);
    EXPECT_LE(c.theta, kPi / 2);
    EXPECT_GE(c.w, c.h);
    EXPECT_EQ(canonicalize(c), c);
    const ConvexPolygon pb = corners(b);
    const ConvexPolygon pc = corners(c);
    for (Point p : pb.vertices()) EXPECT_TRUE(has_vertex(pc, p, 1e-9));
    EXPECT_NEAR(skew_iou(b, c), 1.0, 1e-9);
  }
}

TEST(Canonicalize, RejectsInvalidBoxes) {
  EXPECT_THROW(canonicalize({0, 0, 0, 1, 0}), InvalidBoxError);
  EXPECT_THROW(canonicalize({0, 0, 1, -1, 0}), InvalidBoxError);
  EXPECT_THROW(canonicalize({std::nan(""), 0, 1, 1, 0}), InvalidBoxError);
  EXPECT_THROW(canonicalize({0, 0, 1, 1, std::numeric_limits<double>::infinity()}),
               InvalidBoxError);
}

TEST(Corners, AxisAlignedSquare) {
  const ConvexPolygon p = corners({1, 1, 2, 2, 0});
  ASSERT_EQ(p.size(), 4u);
  for (Point v : {Point{0, 0}, Point{2, 0}, Point{2, 2}, Point{0, 2}}) {
    EXPECT_TRUE(has_vertex(p, v));
  }
}

TEST(Corners, RotatedSquare) {
  const ConvexPolygon p = corners({0, 0, 2, 2, kPi / 4});
  const double r = std::sqrt(2.0);
  for (Point v : {Point{r, 0}, Point{-r, 0}, Point{0, r}, Point{0, -r}}) {
    EXPECT_TRUE(has_vertex(p, v));
  }
}

TEST(Corners, ShoelaceAreaMatchesExtents) {
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    OrientedBox b = random_box(rng, 0.1, 10.0, 1000.0);
    b.w *= rng.uniform(0.01, 30.0);
    const ConvexPolygon p = corners(b);
    EXPECT_NEAR(signed_area(p.vertices()), b.w * b.h, 1e-9 * b.w * b.h);
  }
}

TEST(ConvexPolygon, RejectsBadRings) {
  EXPECT_THROW(ConvexPolygon::from_vertices({{0, 0}, {1, 0}}), InvalidSpecError);
  // Clockwise ring.
  EXPECT_THROW(ConvexPolygon::from_vertices({{0, 0}, {0, 1}, {1, 1}, {1, 0}}),
               InvalidSpecError);
  // Reflex vertex.
  EXPECT_THROW(ConvexPolygon::from_vertices(
                   {{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}}),
               InvalidSpecError);
  EXPECT_NO_THROW(ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {2, 0}, {2, 1}}));
}

TEST(IntersectConvex, SelfIntersection) {
  const ConvexPolygon sq = corners({0, 0, 2, 2, 0});
  const auto r = intersect_convex(sq, sq);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->area(), 4.0, 1e-12);
}

TEST(IntersectConvex, Disjoint) {
  EXPECT_FALSE(intersect_convex(corners({0, 0, 1, 1, 0}), corners({10, 0, 1, 1, 0}))
                   .has_value());
}

TEST(IntersectConvex, EdgeContactIsEmpty) {
  EXPECT_FALSE(intersect_convex(corners({0, 0, 1, 1, 0}), corners({1, 0, 1, 1, 0}))
                   .has_value());
}

TEST(IntersectConvex, SquareAndItsDiagonalRotationGiveOctagon) {
  const auto r = intersect_convex(corners({0, 0, 2, 2, 0}),
                                  corners({0, 0, 2, 2, kPi / 4}));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->size(), 8u);
  EXPECT_NEAR(r->area(), 8.0 * (std::sqrt(2.0) - 1.0), 1e-12);
  // Independent cross-check by row-interval rasterization.
  const auto est = testing::raster_intersection_area({0, 0, 2, 2, 0},
                                                     {0, 0, 2, 2, kPi / 4}, 4000);
  EXPECT_NEAR(est.area, 8.0 * (std::sqrt(2.0) - 1.0), 1e-3);
}

TEST(IntersectConvex, AreaBoundedByOperands) {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = testing::nearby_box(rng, a);
    const auto r = intersect_convex(corners(a), corners(b));
    if (!r) continue;
    EXPECT_LE(r->area(), std::min(a.w * a.h, b.w * b.h) * (1 + 1e-12));
  }
}

TEST(IntersectConvex, AgreesWithPixelCountOracle) {
  Rng rng(7);
  int overlapping = 0;
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = testing::nearby_box(rng, a);
    const auto r = intersect_convex(corners(a), corners(b));
    const double exact = r ? r->area() : 0.0;
    overlapping += r ? 1 : 0;
    const auto est = testing::raster_intersection_area(a, b, 2000);
    // Boundary cells of the intersection region are the only miscounted ones.
    const double perim = r ? r->perimeter() : 0.0;
    EXPECT_LE(std::abs(est.area - exact), 2.0 * perim * est.step + 1e-9) << i;
  }
  EXPECT_GT(overlapping, 700);
}

TEST(SkewIou, Identity) {
  const OrientedBox a{3, -2, 7, 2, 0.4};
  EXPECT_DOUBLE_EQ(skew_iou(a, a), 1.0);
}

TEST(SkewIou, AxisAlignedShift) {
  EXPECT_NEAR(skew_iou({1, 1, 2, 2, 0}, {2, 1, 2, 2, 0}), 1.0 / 3.0, 1e-12);
}

TEST(SkewIou, DiagonalSquares) {
  EXPECT_NEAR(skew_iou({0, 0, 2, 2, 0}, {0, 0, 2, 2, kPi / 4}),
              1.0 / std::sqrt(2.0), 1e-12);
}

TEST(SkewIou, DisjointIsZero) {
  EXPECT_EQ(skew_iou({0, 0, 1, 1, 0}, {10, 0, 1, 1, 0.3}), 0.0);
}

TEST(SkewIou, SymmetricAndInRange) {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = testing::nearby_box(rng, a);
    const double ab = skew_iou(a, b);
    EXPECT_NEAR(ab, skew_iou(b, a), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(SkewIou, InvariantUnderRigidMotion) {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox a = random_box(rng);
    const OrientedBox b = testing::nearby_box(rng, a);
    const double angle = rng.uniform(-kPi, kPi);
    const double tx = rng.uniform(-100, 100), ty = rng.uniform(-100, 100);
    EXPECT_NEAR(skew_iou(a, b),
                skew_iou(testing::rigid(a, angle, tx, ty), testing::rigid(b, angle, tx, ty)),
                1e-9);
  }
}

TEST(HbbIou, UsesAxisAlignedHulls) {
  // 45 degree 2x2 squares have 2√2 hulls; shifted by √2 they overlap by half.
  const double r = std::sqrt(2.0);
  EXPECT_NEAR(hbb_iou({0, 0, 2, 2, kPi / 4}, {r, 0, 2, 2, kPi / 4}), 1.0 / 3.0, 1e-12);
}

TEST(Contains, ClosedBoundary) {
  const OrientedBox b{0, 0, 4, 2, 0};
  EXPECT_TRUE(contains(b, {2, 1}));
  EXPECT_TRUE(contains(b, {0, 0}));
  EXPECT_FALSE(contains(b, {2.001, 0}));
}

}  // namespace
}  // namespace obbkit
