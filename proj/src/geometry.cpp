// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "obbkit/error.hpp"

namespace obbkit {

namespace {

constexpr double kClipEps = 1e-12;
constexpr double kMinArea = 1e-12;
constexpr double kConvexTol = 1e-9;

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

Point OrientedBox::axis_u() const { return {std::cos(theta), std::sin(theta)}; }

Point OrientedBox::axis_v() const { return {-std::sin(theta), std::cos(theta)}; }

void validate(const OrientedBox& box) {
  const bool finite = std::isfinite(box.cx) && std::isfinite(box.cy) &&
                      std::isfinite(box.w) && std::isfinite(box.h) &&
                      std::isfinite(box.theta);
  if (!finite || !(box.w > 0.0) || !(box.h > 0.0)) {
    std::ostringstream msg;
    msg << "invalid box (" << box.cx << ", " << box.cy << ", " << box.w << ", "
        << box.h << ", " << box.theta << ")";
    throw InvalidBoxError(msg.str());
  }
}

double wrap_half_pi(double angle) {
  double r = std::remainder(angle, kPi);
  if (r <= -kPi / 2) r += kPi;
  if (r > kPi / 2) r -= kPi;
  return r;
}

OrientedBox canonicalize(const OrientedBox& box) {
  validate(box);
  OrientedBox out = box;
  if (out.w < out.h) {
    std::swap(out.w, out.h);
    out.theta += kPi / 2;
  }
  out.theta = wrap_half_pi(out.theta);
  if (out.w == out.h) {
    // A square is symmetric under quarter turns.
    while (out.theta > kPi / 4) out.theta -= kPi / 2;
    while (out.theta <= -kPi / 4) out.theta += kPi / 2;
  }
  return out;
}

std::array<double, 4> axis_aligned_hull(const OrientedBox& box) {
  const double c = std::abs(std::cos(box.theta));
  const double s = std::abs(std::sin(box.theta));
  const double hx = 0.5 * (box.w * c + box.h * s);
  const double hy = 0.5 * (box.w * s + box.h * c);
  return {box.cx - hx, box.cy - hy, box.cx + hx, box.cy + hy};
}

bool contains(const OrientedBox& box, Point p) {
  const Point u = box.axis_u();
  const double dx = p.x - box.cx;
  const double dy = p.y - box.cy;
  const double a = dx * u.x + dy * u.y;
  const double b = -dx * u.y + dy * u.x;
  return std::abs(a) <= 0.5 * box.w && std::abs(b) <= 0.5 * box.h;
}

double signed_area(std::span<const Point> ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point& p = ring[i];
    const Point& q = ring[(i + 1) % ring.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Point> vertices) {
  if (vertices.size() < 3) {
    throw InvalidSpecError("polygon needs at least 3 vertices");
  }
  for (const Point& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidSpecError("polygon vertex is not finite");
    }
  }
  const double area = signed_area(vertices);
  if (!(area > 0.0)) {
    throw InvalidSpecError("polygon must have positive shoelace area");
  }
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& o = vertices[i];
    const Point& a = vertices[(i + 1) % n];
    const Point& b = vertices[(i + 2) % n];
    const double scale = distance(o, a) * distance(a, b);
    if (cross(o, a, b) < -kConvexTol * std::max(scale, 1.0)) {
      throw InvalidSpecError("polygon is not convex");
    }
  }
  return ConvexPolygon(std::move(vertices));
}

double ConvexPolygon::area() const { return signed_area(vertices_); }

double ConvexPolygon::perimeter() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    sum += distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return sum;
}

ConvexPolygon corners(const OrientedBox& box) {
  validate(box);
  const Point u = box.axis_u();
  const Point v = box.axis_v();
  const double hw = 0.5 * box.w;
  const double hh = 0.5 * box.h;
  auto at = [&](double a, double b) {
    return Point{box.cx + a * u.x + b * v.x, box.cy + a * u.y + b * v.y};
  };
  return ConvexPolygon({at(-hw, -hh), at(hw, -hh), at(hw, hh), at(-hw, hh)});
}

std::optional<ConvexPolygon> intersect_convex(const ConvexPolygon& a,
                                              const ConvexPolygon& b) {
  if (a.area() < kMinArea || b.area() < kMinArea) return std::nullopt;

  std::vector<Point> subject(a.vertices_.begin(), a.vertices_.end());
  std::vector<Point> next;
  next.reserve(subject.size() + b.size());

  const auto& clip = b.vertices_;
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Point p0 = clip[e];
    const Point p1 = clip[(e + 1) % clip.size()];
    const double eps = kClipEps * distance(p0, p1);
    next.clear();
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Point s = subject[i];
      const Point q = subject[(i + 1) % subject.size()];
      const double ds = cross(p0, p1, s);
      const double dq = cross(p0, p1, q);
      const bool s_in = ds >= -eps;
      const bool q_in = dq >= -eps;
      if (s_in) next.push_back(s);
      if (s_in != q_in) {
        const double t = ds / (ds - dq);
        next.push_back({s.x + t * (q.x - s.x), s.y + t * (q.y - s.y)});
      }
    }
    subject.swap(next);
  }

  // Drop coincident neighbours produced by vertices lying on clip edges.
  std::vector<Point> ring;
  ring.reserve(subject.size());
  for (const Point& p : subject) {
    if (ring.empty() || distance(ring.back(), p) > kClipEps) ring.push_back(p);
  }
  while (ring.size() > 1 && distance(ring.front(), ring.back()) <= kClipEps) {
    ring.pop_back();
  }
  if (ring.size() < 3 || signed_area(ring) < kMinArea) return std::nullopt;
  return ConvexPolygon(std::move(ring));
}

double skew_iou(const OrientedBox& a, const OrientedBox& b) {
  validate(a);
  validate(b);
  if (a == b) return 1.0;
  // Fixed operand order makes the result exactly symmetric.
  const auto key = [](const OrientedBox& x) {
    return std::tie(x.cx, x.cy, x.w, x.h, x.theta);
  };
  const OrientedBox& first = key(b) < key(a) ? b : a;
  const OrientedBox& second = &first == &a ? b : a;

  const auto ha = axis_aligned_hull(first);
  const auto hb = axis_aligned_hull(second);
  if (ha[2] < hb[0] || hb[2] < ha[0] || ha[3] < hb[1] || hb[3] < ha[1]) {
    return 0.0;
  }
  const auto inter = intersect_convex(corners(first), corners(second));
  if (!inter) return 0.0;
  const double ia = inter->area();
  const double uni = first.w * first.h + second.w * second.h - ia;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(ia / uni, 0.0, 1.0);
}

double hbb_iou(const OrientedBox& a, const OrientedBox& b) {
  const auto ha = axis_aligned_hull(a);
  const auto hb = axis_aligned_hull(b);
  const double iw = std::min(ha[2], hb[2]) - std::max(ha[0], hb[0]);
  const double ih = std::min(ha[3], hb[3]) - std::max(ha[1], hb[1]);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (ha[2] - ha[0]) * (ha[3] - ha[1]);
  const double area_b = (hb[2] - hb[0]) * (hb[3] - hb[1]);
  return inter / (area_a + area_b - inter);
}

}  // namespace obbkit
