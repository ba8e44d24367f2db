// Copyright 2026 The textdet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace textdet {

// Absolute tolerance for point equality and clip classification, in
// canonical image units.
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool is_finite(Point2 p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

inline bool approx_equal(Point2 a, Point2 b, double eps = kGeomEps) {
  return distance(a, b) <= eps;
}

// Shoelace sum / 2 over an ordered vertex ring. Positive means
// counter-clockwise in the shoelace sense (which is the usual top-first
// reading order when y grows downward).
inline double signed_area(std::span<const Point2> ring) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = ring[i];
    const Point2& b = ring[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

// Axis-aligned rectangle stored as min/max corners. Zero-area rects are
// valid degenerate values.
class AARect {
 public:
  AARect(Point2 min_corner, Point2 max_corner)
      : min_(min_corner), max_(max_corner) {
    if (!is_finite(min_) || !is_finite(max_)) {
      throw std::invalid_argument("AARect: corners must be finite");
    }
    if (min_.x > max_.x || min_.y > max_.y) {
      throw std::invalid_argument("AARect: min corner must not exceed max");
    }
  }

  Point2 min() const { return min_; }
  Point2 max() const { return max_; }
  double width() const { return max_.x - min_.x; }
  double height() const { return max_.y - min_.y; }
  double area() const { return width() * height(); }

  std::array<Point2, 4> corners() const {
    return {Point2{min_.x, min_.y}, Point2{max_.x, min_.y},
            Point2{max_.x, max_.y}, Point2{min_.x, max_.y}};
  }

 private:
  Point2 min_;
  Point2 max_;
};

inline AARect enclosing_aarect(std::span<const Point2> points) {
  if (points.empty()) {
    throw std::invalid_argument("enclosing_aarect: empty point set");
  }
  double xmin = points[0].x, xmax = points[0].x;
  double ymin = points[0].y, ymax = points[0].y;
  for (const Point2& p : points) {
    if (!is_finite(p)) {
      throw std::invalid_argument("enclosing_aarect: non-finite point");
    }
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return AARect({xmin, ymin}, {xmax, ymax});
}

// Oriented rectangle: center, side lengths, rotation angle in radians.
// The same point set has several (width,height,angle) encodings; canonical()
// folds them onto angle in [-pi/2, pi/2) with width >= height.
class RotatedRect {
 public:
  RotatedRect(Point2 center, double width, double height, double angle)
      : center_(center), width_(width), height_(height), angle_(angle) {
    if (!is_finite(center_) || !std::isfinite(width_) ||
        !std::isfinite(height_) || !std::isfinite(angle_)) {
      throw std::invalid_argument("RotatedRect: non-finite field");
    }
    if (width_ < 0.0 || height_ < 0.0) {
      throw std::invalid_argument("RotatedRect: negative side length");
    }
  }

  Point2 center() const { return center_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double angle() const { return angle_; }
  double area() const { return width_ * height_; }

  // Corners in counter-clockwise order (positive shoelace).
  std::array<Point2, 4> corners() const {
    const double c = std::cos(angle_), s = std::sin(angle_);
    const double hw = 0.5 * width_, hh = 0.5 * height_;
    auto at = [&](double u, double v) {
      return Point2{center_.x + u * c - v * s, center_.y + u * s + v * c};
    };
    return {at(-hw, -hh), at(hw, -hh), at(hw, hh), at(-hw, hh)};
  }

  RotatedRect canonical() const {
    double w = width_, h = height_, a = angle_;
    if (w < h) {
      std::swap(w, h);
      a += std::numbers::pi / 2.0;
    }
    a = wrap_half_pi(a, std::numbers::pi);
    if (w == h) {
      // Squares repeat every quarter turn.
      a = wrap_half_pi(a, std::numbers::pi / 2.0);
    }
    if (w == 0.0 && h == 0.0) a = 0.0;
    return RotatedRect(center_, w, h, a);
  }

 private:
  // Wrap into [-period/2, period/2).
  static double wrap_half_pi(double a, double period) {
    a = std::remainder(a, period);
    if (a >= period / 2.0) a -= period;
    return a;
  }

  Point2 center_;
  double width_;
  double height_;
  double angle_;
};

// Ordered n-vertex polygon boundary. Construction canonicalizes winding:
// vertex order is reversed when the shoelace area is negative, so stored
// polygons always have signed_area >= 0. Degenerate (zero-area) polygons
// are allowed.
class TextPolygon {
 public:
  explicit TextPolygon(std::vector<Point2> vertices)
      : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
      throw std::invalid_argument("TextPolygon: need at least 3 vertices");
    }
    for (const Point2& p : vertices_) {
      if (!is_finite(p)) {
        throw std::invalid_argument("TextPolygon: non-finite vertex");
      }
    }
    if (signed_area(vertices_) < 0.0) {
      std::reverse(vertices_.begin(), vertices_.end());
    }
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  // Convexity via turn-sign test; collinear runs count as convex.
  bool is_convex() const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = vertices_[i];
      const Point2& b = vertices_[(i + 1) % n];
      const Point2& c = vertices_[(i + 2) % n];
      const Point2 u = b - a, v = c - b;
      const double lu = norm(u), lv = norm(v);
      if (lu <= kGeomEps || lv <= kGeomEps) continue;
      if (cross(u, v) / (lu * lv) < -kGeomEps) return false;
    }
    return true;
  }

 private:
  std::vector<Point2> vertices_;
};

inline double polygon_area(const TextPolygon& p) {
  return std::abs(signed_area(p.vertices()));
}

// Strict convex hull (collinear boundary points dropped), counter-clockwise.
// Returns fewer than 3 points when the input is collinear or a single point.
inline std::vector<Point2> convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Point2 a, Point2 b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 &&
           cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower &&
           cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

namespace detail {

// Signed distance of p to the directed line a->b; positive on the left.
inline double line_side(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len = norm(d);
  if (len <= kGeomEps) return 0.0;
  return cross(d, p - a) / len;
}

inline void require_convex(const TextPolygon& p, const char* who) {
  if (!p.is_convex()) {
    throw std::invalid_argument(std::string(who) +
                                ": non-convex polygon; decompose first");
  }
}

inline std::vector<Point2> dedupe_ring(std::vector<Point2> ring) {
  std::vector<Point2> out;
  for (const Point2& p : ring) {
    if (out.empty() || !approx_equal(out.back(), p)) out.push_back(p);
  }
  while (out.size() > 1 && approx_equal(out.front(), out.back())) {
    out.pop_back();
  }
  return out;
}

}  // namespace detail

// Successive half-plane clipping of one convex polygon by the edges of
// another. Empty (nullopt) when the regions are disjoint or the overlap
// degenerates below 3 vertices. Throws on non-convex input.
inline std::optional<TextPolygon> convex_intersection(const TextPolygon& a,
                                                      const TextPolygon& b) {
  detail::require_convex(a, "convex_intersection");
  detail::require_convex(b, "convex_intersection");

  std::vector<Point2> out = a.vertices();
  const std::vector<Point2>& clip = b.vertices();
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Point2 p = clip[e];
    const Point2 q = clip[(e + 1) % m];
    if (distance(p, q) <= kGeomEps) continue;
    const std::vector<Point2> input = std::move(out);
    out = {};
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 prev = input[(i + n - 1) % n];
      const Point2 cur = input[i];
      const double dp = detail::line_side(prev, p, q);
      const double dc = detail::line_side(cur, p, q);
      const bool prev_in = dp >= -kGeomEps;
      const bool cur_in = dc >= -kGeomEps;
      if (cur_in) {
        if (!prev_in) {
          const double s = dp / (dp - dc);
          out.push_back(prev + s * (cur - prev));
        }
        out.push_back(cur);
      } else if (prev_in) {
        const double s = dp / (dp - dc);
        out.push_back(prev + s * (cur - prev));
      }
    }
  }
  out = detail::dedupe_ring(std::move(out));
  if (out.size() < 3) return std::nullopt;
  return TextPolygon(std::move(out));
}

inline double iou(const AARect& a, const AARect& b) {
  const double iw = std::min(a.max().x, b.max().x) - std::max(a.min().x, b.min().x);
  const double ih = std::min(a.max().y, b.max().y) - std::max(a.min().y, b.min().y);
  const double inter = std::max(iw, 0.0) * std::max(ih, 0.0);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;  // both degenerate
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline double iou(const TextPolygon& a, const TextPolygon& b) {
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  const auto inter = convex_intersection(a, b);
  const double inter_area = inter ? polygon_area(*inter) : 0.0;
  const double uni = area_a + area_b - inter_area;
  if (uni <= 1e-18) return 0.0;
  return std::clamp(inter_area / uni, 0.0, 1.0);
}

inline double iou(const RotatedRect& a, const RotatedRect& b) {
  auto ca = a.corners();
  auto cb = b.corners();
  return iou(TextPolygon({ca.begin(), ca.end()}),
             TextPolygon({cb.begin(), cb.end()}));
}

// GIoU = IoU - Area(C \ (a u b)) / Area(C). The enclosing region C is the
// min/max box for axis-aligned operands and the convex hull of both vertex
// sets otherwise. Throws when C itself is degenerate.
inline double giou(const AARect& a, const AARect& b) {
  const Point2 cmin{std::min(a.min().x, b.min().x), std::min(a.min().y, b.min().y)};
  const Point2 cmax{std::max(a.max().x, b.max().x), std::max(a.max().y, b.max().y)};
  const double c_area = (cmax.x - cmin.x) * (cmax.y - cmin.y);
  if (c_area <= 0.0) {
    throw std::invalid_argument("giou: enclosing region has zero area");
  }
  const double iw = std::min(a.max().x, b.max().x) - std::max(a.min().x, b.min().x);
  const double ih = std::min(a.max().y, b.max().y) - std::max(a.min().y, b.min().y);
  const double inter = std::max(iw, 0.0) * std::max(ih, 0.0);
  const double uni = a.area() + b.area() - inter;
  const double i = uni > 0.0 ? inter / uni : 0.0;
  return i - std::max(c_area - uni, 0.0) / c_area;
}

inline double giou(const TextPolygon& a, const TextPolygon& b) {
  const double area_a = polygon_area(a);
  const double area_b = polygon_area(b);
  const auto inter = convex_intersection(a, b);
  const double inter_area = inter ? polygon_area(*inter) : 0.0;
  const double uni = area_a + area_b - inter_area;

  std::vector<Point2> both(a.vertices());
  both.insert(both.end(), b.vertices().begin(), b.vertices().end());
  const std::vector<Point2> hull = convex_hull(both);
  const double c_area = hull.size() >= 3 ? std::abs(signed_area(hull)) : 0.0;
  if (c_area <= 0.0) {
    throw std::invalid_argument("giou: enclosing region has zero area");
  }
  const double i = uni > 1e-18 ? inter_area / uni : 0.0;
  return i - std::max(c_area - uni, 0.0) / c_area;
}

inline double giou(const RotatedRect& a, const RotatedRect& b) {
  auto ca = a.corners();
  auto cb = b.corners();
  return giou(TextPolygon({ca.begin(), ca.end()}),
              TextPolygon({cb.begin(), cb.end()}));
}

// Smallest-area oriented rectangle containing all points: the optimum is
// flush with a convex-hull edge, so sweep hull edges. Collinear inputs give
// a zero-height rect.
inline RotatedRect min_area_rotated_rect(std::span<const Point2> points) {
  if (points.size() < 3) {
    throw std::invalid_argument("min_area_rotated_rect: need >= 3 points");
  }
  for (const Point2& p : points) {
    if (!is_finite(p)) {
      throw std::invalid_argument("min_area_rotated_rect: non-finite point");
    }
  }
  const std::vector<Point2> hull = convex_hull(points);
  if (hull.size() == 1) {
    return RotatedRect(hull[0], 0.0, 0.0, 0.0);
  }
  if (hull.size() == 2) {
    const Point2 d = hull[1] - hull[0];
    const double len = norm(d);
    const Point2 mid = hull[0] + 0.5 * d;
    return RotatedRect(mid, len, 0.0, std::atan2(d.y, d.x)).canonical();
  }

  double best_area = std::numeric_limits<double>::infinity();
  RotatedRect best({0, 0}, 0, 0, 0);
  const std::size_t n = hull.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Point2 edge = hull[(e + 1) % n] - hull[e];
    const double len = norm(edge);
    if (len <= kGeomEps) continue;
    const Point2 dir{edge.x / len, edge.y / len};
    const Point2 nrm{-dir.y, dir.x};
    double smin = dot(dir, hull[0]), smax = smin;
    double tmin = dot(nrm, hull[0]), tmax = tmin;
    for (const Point2& p : hull) {
      const double s = dot(dir, p), t = dot(nrm, p);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
    const double area = (smax - smin) * (tmax - tmin);
    if (area < best_area) {
      best_area = area;
      const double sc = 0.5 * (smin + smax);
      const double tc = 0.5 * (tmin + tmax);
      best = RotatedRect({sc * dir.x + tc * nrm.x, sc * dir.y + tc * nrm.y},
                         smax - smin, tmax - tmin, std::atan2(dir.y, dir.x));
    }
  }
  return best.canonical();
}

}  // namespace textdet
