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

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "textdet/geometry.hpp"

namespace textdet {

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace detail

// Bernstein basis polynomial of degree n evaluated at t.
inline double bernstein(int i, int n, double t) {
  if (n < 0 || i < 0 || i > n)
    throw std::invalid_argument("bernstein: index must satisfy 0 <= i <= n");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("bernstein: t must lie in [0, 1]");
  return detail::binomial(n, i) * std::pow(t, i) * std::pow(1.0 - t, n - i);
}

class BezierCurve {
 public:
  explicit BezierCurve(std::vector<Point2> control_points)
      : pts_(std::move(control_points)) {
    if (pts_.size() < 2)
      throw std::invalid_argument(
          "BezierCurve: need at least 2 control points");
    for (const Point2& p : pts_)
      if (!is_finite(p))
        throw std::invalid_argument(
            "BezierCurve: control points must be finite");
  }

  int degree() const { return static_cast<int>(pts_.size()) - 1; }
  const std::vector<Point2>& control_points() const { return pts_; }

 private:
  std::vector<Point2> pts_;
};

// De Casteljau evaluation; exact at the endpoints.
inline Point2 bezier_eval(const BezierCurve& c, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("bezier_eval: t must lie in [0, 1]");
  std::vector<Point2> w = c.control_points();
  for (std::size_t len = w.size() - 1; len > 0; --len)
    for (std::size_t k = 0; k < len; ++k)
      w[k] = (1.0 - t) * w[k] + t * w[k + 1];
  return w[0];
}

// Closed text boundary: cubic top side left-to-right, cubic bottom side
// right-to-left, 8 control points / 16 coordinates total.
struct BezierPair {
  BezierCurve top;
  BezierCurve bottom;

  BezierPair(BezierCurve top_curve, BezierCurve bottom_curve)
      : top(std::move(top_curve)), bottom(std::move(bottom_curve)) {
    if (top.degree() != 3 || bottom.degree() != 3)
      throw std::invalid_argument("BezierPair: both sides must be cubic");
  }
};

// Flattening order: top P0..P3 then bottom P0..P3, x before y.
inline std::array<double, 16> pair_coordinates(const BezierPair& pair) {
  std::array<double, 16> c{};
  std::size_t k = 0;
  for (const auto* side : {&pair.top, &pair.bottom})
    for (const Point2& p : side->control_points()) {
      c[k++] = p.x;
      c[k++] = p.y;
    }
  return c;
}

inline BezierPair pair_from_coordinates(const std::array<double, 16>& c) {
  auto side = [&](std::size_t base) {
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < 4; ++i)
      pts.push_back({c[base + 2 * i], c[base + 2 * i + 1]});
    return BezierCurve(std::move(pts));
  };
  return BezierPair(side(0), side(8));
}

// Uniform boundary samples, n_v per side at t_k = k/(n_v - 1).
inline TextPolygon sample_polygon(const BezierPair& pair, int n_v) {
  if (n_v < 2)
    throw std::invalid_argument(
        "sample_polygon: need at least 2 samples per side");
  std::vector<Point2> verts;
  verts.reserve(static_cast<std::size_t>(2 * n_v));
  for (const auto* side : {&pair.top, &pair.bottom})
    for (int k = 0; k < n_v; ++k)
      verts.push_back(
          bezier_eval(*side, static_cast<double>(k) / (n_v - 1)));
  return TextPolygon(std::move(verts));
}

namespace detail {

struct InteriorControls {
  Point2 p1;
  Point2 p2;
};

// Pinned-endpoint least-squares solve for the two interior control points
// at fixed parameter values: 2x2 normal equations in the Bernstein basis.
inline InteriorControls solve_pinned_cubic(std::span<const Point2> points,
                                           std::span<const double> t,
                                           Point2 p0, Point2 p3) {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;
  Point2 r1{0.0, 0.0};
  Point2 r2{0.0, 0.0};
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double b0 = bernstein(0, 3, t[k]);
    const double b1 = bernstein(1, 3, t[k]);
    const double b2 = bernstein(2, 3, t[k]);
    const double b3 = bernstein(3, 3, t[k]);
    const Point2 resid = points[k] - b0 * p0 - b3 * p3;
    a11 += b1 * b1;
    a12 += b1 * b2;
    a22 += b2 * b2;
    r1 = r1 + b1 * resid;
    r2 = r2 + b2 * resid;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(det > 1e-12 * std::max(1.0, a11 * a22)))
    throw std::runtime_error(
        "fit_bezier: singular normal system (det = " + std::to_string(det) +
        "); interior control points are unconstrained, check for repeated "
        "or endpoint-collapsed input points");
  return {(1.0 / det) * (a22 * r1 - a12 * r2),
          (1.0 / det) * (a11 * r2 - a12 * r1)};
}

}  // namespace detail

// Least-squares cubic through ordered side points. Endpoints are pinned to
// the first/last input points; the two interior control points solve the
// 2x2 normal equations at fixed parameters, refined by projecting each
// sample onto the current fit and re-solving. The project/re-solve scheme
// only finds a local optimum, so two parameter starts are tried (chord
// length, then uniform index) and the fit with the smaller worst-case
// residual wins. Either start recovers an exact cubic: chord length when
// samples are spaced by arc, uniform index when they come from even
// parameter steps the way sample_polygon produces them.
inline BezierCurve fit_bezier(std::span<const Point2> points) {
  const std::size_t m = points.size();
  if (m < 4) throw std::invalid_argument("fit_bezier: need at least 4 points");
  for (const Point2& p : points)
    if (!is_finite(p))
      throw std::invalid_argument("fit_bezier: points must be finite");

  std::vector<double> chord(m, 0.0);
  for (std::size_t i = 1; i < m; ++i)
    chord[i] = chord[i - 1] + distance(points[i], points[i - 1]);
  const double len = chord.back();
  if (!(len > 0.0))
    throw std::runtime_error("fit_bezier: all input points coincide");
  for (double& u : chord) u /= len;

  const Point2 p0 = points.front();
  const Point2 p3 = points.back();

  // With exactly 4 points the chord-parameter fit already interpolates.
  if (m == 4) {
    const detail::InteriorControls sol =
        detail::solve_pinned_cubic(points, chord, p0, p3);
    return BezierCurve({p0, sol.p1, sol.p2, p3});
  }

  auto eval_at = [&](const detail::InteriorControls& s, double u) {
    const double v = 1.0 - u;
    return (v * v * v) * p0 + (3.0 * v * v * u) * s.p1 +
           (3.0 * v * u * u) * s.p2 + (u * u * u) * p3;
  };

  struct Candidate {
    detail::InteriorControls sol;
    double residual;
  };

  // Convergence is linear, so the sweep budget is generous; exact-cubic
  // inputs exit early instead.
  auto refine = [&](std::vector<double> t) -> Candidate {
    detail::InteriorControls sol =
        detail::solve_pinned_cubic(points, t, p0, p3);
    constexpr int kMaxCorrectionSweeps = 512;
    for (int iter = 0; iter < kMaxCorrectionSweeps; ++iter) {
      const Point2 d10 = sol.p1 - p0;
      const Point2 d21 = sol.p2 - sol.p1;
      const Point2 d32 = p3 - sol.p2;
      const Point2 dd0 = d21 - d10;
      const Point2 dd1 = d32 - d21;
      double max_shift = 0.0;
      for (std::size_t k = 1; k + 1 < m; ++k) {
        const double u = t[k];
        const double v = 1.0 - u;
        const Point2 c1 =
            3.0 * ((v * v) * d10 + (2.0 * u * v) * d21 + (u * u) * d32);
        const Point2 c2 = 6.0 * (v * dd0 + u * dd1);
        const Point2 e = eval_at(sol, u) - points[k];
        const double g = dot(e, c1);
        const double gp = dot(c1, c1) + dot(e, c2);
        if (std::abs(gp) <= 1e-18) continue;
        double tn = std::clamp(u - g / gp, 0.0, 1.0);
        tn = std::max(tn, t[k - 1] + 1e-12);
        max_shift = std::max(max_shift, std::abs(tn - u));
        t[k] = tn;
      }
      if (max_shift < 1e-13) break;
      try {
        sol = detail::solve_pinned_cubic(points, t, p0, p3);
      } catch (const std::runtime_error&) {
        break;
      }
    }
    double residual = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      residual = std::max(
          residual, distance(eval_at(sol, std::clamp(t[k], 0.0, 1.0)),
                             points[k]));
    return {sol, residual};
  };

  Candidate best = refine(chord);
  if (best.residual > 1e-9 * len) {
    std::vector<double> uniform(m);
    for (std::size_t i = 0; i < m; ++i)
      uniform[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    try {
      const Candidate alt = refine(std::move(uniform));
      if (alt.residual < best.residual) best = alt;
    } catch (const std::runtime_error&) {
    }
  }
  return BezierCurve({p0, best.sol.p1, best.sol.p2, p3});
}

// Quadrilateral in reading order (tl, tr, br, bl) to a straight-sided pair:
// interior control points at 1/3 and 2/3 along each horizontal edge.
inline BezierPair quad_to_bezier_pair(const TextPolygon& q) {
  if (q.vertices().size() != 4)
    throw std::invalid_argument(
        "quad_to_bezier_pair: need exactly 4 vertices");
  const std::vector<Point2>& v = q.vertices();
  auto edge_curve = [](const Point2& a, const Point2& b) {
    const Point2 d = b - a;
    return BezierCurve({a, a + (1.0 / 3.0) * d, a + (2.0 / 3.0) * d, b});
  };
  return BezierPair(edge_curve(v[0], v[1]), edge_curve(v[2], v[3]));
}

// First half of the ring is the top side in order, second half the bottom
// side (right-to-left); each side is fitted independently.
inline BezierPair polygon_to_bezier_pair(const TextPolygon& p) {
  const std::vector<Point2>& v = p.vertices();
  if (v.size() % 2 != 0)
    throw std::invalid_argument(
        "polygon_to_bezier_pair: vertex count must be even");
  const std::size_t half = v.size() / 2;
  const std::span<const Point2> all(v);
  return BezierPair(fit_bezier(all.subspan(0, half)),
                    fit_bezier(all.subspan(half)));
}

}  // namespace textdet
