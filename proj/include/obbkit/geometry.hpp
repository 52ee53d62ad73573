// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace obbkit {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Five-parameter rotated rectangle in image coordinates (x right, y down).
///
/// `theta` rotates the w-axis away from +x toward +y. The pair
/// (w, h, theta) and (h, w, theta + pi/2) describe the same point set, as do
/// theta and theta + pi.
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;
  double theta = 0.0;

  /// Unit vector of the w-axis.
  Point axis_u() const;
  /// Unit vector of the h-axis (axis_u rotated by +pi/2).
  Point axis_v() const;

  bool operator==(const OrientedBox&) const = default;
};

/// Throws InvalidBoxError unless every field is finite and w, h > 0.
void validate(const OrientedBox& box);

/// Maps a box to the unique representative of its point set:
/// w >= h and theta in (-pi/2, pi/2]; squares additionally use
/// theta in (-pi/4, pi/4].
OrientedBox canonicalize(const OrientedBox& box);

/// Wraps an angle into (-pi/2, pi/2].
double wrap_half_pi(double angle);

/// Axis-aligned hull [min_x, min_y, max_x, max_y].
std::array<double, 4> axis_aligned_hull(const OrientedBox& box);

/// Ordered vertex ring with positive shoelace area.
class ConvexPolygon {
 public:
  /// Validates size >= 3, positive area and convexity (collinear points are
  /// tolerated up to 1e-9 relative).
  static ConvexPolygon from_vertices(std::vector<Point> vertices);

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  double area() const;
  double perimeter() const;

 private:
  friend std::optional<ConvexPolygon> intersect_convex(const ConvexPolygon&,
                                                       const ConvexPolygon&);
  friend ConvexPolygon corners(const OrientedBox&);

  explicit ConvexPolygon(std::vector<Point> v) : vertices_(std::move(v)) {}

  std::vector<Point> vertices_;
};

/// Signed shoelace area of an arbitrary vertex ring.
double signed_area(std::span<const Point> ring);

ConvexPolygon corners(const OrientedBox& box);

/// Convex intersection by successive half-plane clipping. Returns nullopt when
/// the intersection has area below 1e-12.
std::optional<ConvexPolygon> intersect_convex(const ConvexPolygon& a,
                                              const ConvexPolygon& b);

/// Exact polygon-area IoU of two oriented boxes, in [0, 1].
double skew_iou(const OrientedBox& a, const OrientedBox& b);

/// IoU of the axis-aligned hulls of two boxes.
double hbb_iou(const OrientedBox& a, const OrientedBox& b);

/// True if `p` lies in the closed box.
bool contains(const OrientedBox& box, Point p);

}  // namespace obbkit
