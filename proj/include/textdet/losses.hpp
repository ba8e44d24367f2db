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
#include <vector>

#include "textdet/bezier.hpp"
#include "textdet/geometry.hpp"

namespace textdet {

enum class SplitMode { FullRect, SplitRect3, SplitRotatedRect3 };
enum class Reduction { Sum, Mean };

struct BoxLossConfig {
  double lambda1 = 5.0;
  double lambda2 = 2.0;
  SplitMode split_mode = SplitMode::FullRect;
  Reduction reduction = Reduction::Sum;
};

inline void validate(const BoxLossConfig& cfg) {
  if (!std::isfinite(cfg.lambda1) || !std::isfinite(cfg.lambda2) ||
      cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0)
    throw std::invalid_argument(
        "BoxLossConfig: weights must be finite and non-negative");
}

struct LossValue {
  double total = 0.0;
  double regression_term = 0.0;
  double giou_term = 0.0;
};

// (|d|+1) ln(|d|+1) - |d| summed (or averaged) over components.
inline double smooth_ln(std::span<const double> delta,
                        Reduction reduction = Reduction::Sum) {
  if (delta.empty()) return 0.0;
  double s = 0.0;
  for (double d : delta) {
    if (!std::isfinite(d))
      throw std::invalid_argument("smooth_ln: components must be finite");
    const double a = std::abs(d);
    s += (a + 1.0) * std::log1p(a) - a;
  }
  if (reduction == Reduction::Mean) s /= static_cast<double>(delta.size());
  return s;
}

inline double smooth_ln(double delta) {
  return smooth_ln(std::span<const double>(&delta, 1));
}

// Componentwise derivative sign(d) ln(|d|+1); continuous through zero.
inline std::vector<double> smooth_ln_grad(std::span<const double> delta) {
  std::vector<double> g;
  g.reserve(delta.size());
  for (double d : delta) {
    if (!std::isfinite(d))
      throw std::invalid_argument("smooth_ln_grad: components must be finite");
    const double m = std::log1p(std::abs(d));
    g.push_back(d > 0.0 ? m : (d < 0.0 ? -m : 0.0));
  }
  return g;
}

inline double giou_loss(const AARect& a, const AARect& b) {
  return 1.0 - giou(a, b);
}
inline double giou_loss(const TextPolygon& a, const TextPolygon& b) {
  return 1.0 - giou(a, b);
}
inline double giou_loss(const RotatedRect& a, const RotatedRect& b) {
  return 1.0 - giou(a, b);
}

// Three overlapping enclosing boxes over the 8 control points: outer boxes
// take a corner pair plus the facing interior pair, the middle box the four
// interior control points. Adjacent boxes share two control points.
inline std::array<AARect, 3> split_rects_from_bezier(const BezierPair& pair) {
  const std::vector<Point2>& t = pair.top.control_points();
  const std::vector<Point2>& b = pair.bottom.control_points();
  auto box = [](Point2 p0, Point2 p1, Point2 p2, Point2 p3) {
    const std::array<Point2, 4> pts{p0, p1, p2, p3};
    return enclosing_aarect(pts);
  };
  return {box(t[0], t[1], b[2], b[3]), box(t[1], t[2], b[1], b[2]),
          box(t[2], t[3], b[0], b[1])};
}

// Rotated analogue over a 20-vertex boundary (10 per side): min-area rects
// over overlapping thirds, adjacent groups sharing one vertex column.
inline std::array<RotatedRect, 3> split_rotated_rects_from_polygon(
    const TextPolygon& p) {
  const std::vector<Point2>& v = p.vertices();
  if (v.size() != 20)
    throw std::invalid_argument(
        "split_rotated_rects_from_polygon: need exactly 20 vertices");
  auto group = [&](std::size_t top_lo, std::size_t bot_lo) {
    std::vector<Point2> pts;
    pts.reserve(8);
    for (std::size_t i = 0; i < 4; ++i) pts.push_back(v[top_lo + i]);
    for (std::size_t i = 0; i < 4; ++i) pts.push_back(v[10 + bot_lo + i]);
    return min_area_rotated_rect(pts);
  };
  return {group(0, 6), group(3, 3), group(6, 0)};
}

namespace detail {

inline LossValue combine_loss(const BoxLossConfig& cfg, double reg,
                              double giou_term) {
  return {cfg.lambda1 * reg + cfg.lambda2 * giou_term, reg, giou_term};
}

}  // namespace detail

// Weighted sum of the regression loss over raw coordinate differences and a
// GIoU loss over either the full enclosing box or the 3 split pieces.
inline LossValue box_loss(const BezierPair& pred, const BezierPair& gt,
                          const BoxLossConfig& cfg) {
  validate(cfg);
  if (cfg.split_mode == SplitMode::SplitRotatedRect3)
    throw std::invalid_argument(
        "box_loss: SplitRotatedRect3 applies to 20-vertex polygons, not "
        "control-point pairs");
  const std::array<double, 16> pc = pair_coordinates(pred);
  const std::array<double, 16> gc = pair_coordinates(gt);
  std::array<double, 16> diff{};
  for (std::size_t i = 0; i < 16; ++i) diff[i] = pc[i] - gc[i];
  const double reg = smooth_ln(diff, cfg.reduction);

  double g = 0.0;
  if (cfg.split_mode == SplitMode::FullRect) {
    auto enclose = [](const BezierPair& pr) {
      std::vector<Point2> pts = pr.top.control_points();
      const std::vector<Point2>& b = pr.bottom.control_points();
      pts.insert(pts.end(), b.begin(), b.end());
      return enclosing_aarect(pts);
    };
    g = giou_loss(enclose(pred), enclose(gt));
  } else {
    const std::array<AARect, 3> ra = split_rects_from_bezier(pred);
    const std::array<AARect, 3> rb = split_rects_from_bezier(gt);
    for (int k = 0; k < 3; ++k) g += giou_loss(ra[k], rb[k]);
    g /= 3.0;
  }
  return detail::combine_loss(cfg, reg, g);
}

inline LossValue box_loss(const TextPolygon& pred, const TextPolygon& gt,
                          const BoxLossConfig& cfg) {
  validate(cfg);
  if (cfg.split_mode == SplitMode::SplitRect3)
    throw std::invalid_argument(
        "box_loss: SplitRect3 applies to control-point pairs, not polygons");
  const std::vector<Point2>& pv = pred.vertices();
  const std::vector<Point2>& gv = gt.vertices();
  if (pv.size() != gv.size())
    throw std::invalid_argument("box_loss: vertex counts must match");
  std::vector<double> diff;
  diff.reserve(2 * pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    diff.push_back(pv[i].x - gv[i].x);
    diff.push_back(pv[i].y - gv[i].y);
  }
  const double reg = smooth_ln(diff, cfg.reduction);

  double g = 0.0;
  if (cfg.split_mode == SplitMode::FullRect) {
    g = giou_loss(enclosing_aarect(pv), enclosing_aarect(gv));
  } else {
    const std::array<RotatedRect, 3> ra = split_rotated_rects_from_polygon(pred);
    const std::array<RotatedRect, 3> rb = split_rotated_rects_from_polygon(gt);
    for (int k = 0; k < 3; ++k) g += giou_loss(ra[k], rb[k]);
    g /= 3.0;
  }
  return detail::combine_loss(cfg, reg, g);
}

// Central finite differences of box_loss total over every pred coordinate.
inline std::vector<double> finite_diff_loss_grad(const BezierPair& pred,
                                                 const BezierPair& gt,
                                                 const BoxLossConfig& cfg,
                                                 double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("finite_diff_loss_grad: h must be positive");
  std::array<double, 16> c = pair_coordinates(pred);
  std::vector<double> g(16, 0.0);
  for (std::size_t i = 0; i < 16; ++i) {
    const double saved = c[i];
    c[i] = saved + h;
    const double up = box_loss(pair_from_coordinates(c), gt, cfg).total;
    c[i] = saved - h;
    const double dn = box_loss(pair_from_coordinates(c), gt, cfg).total;
    c[i] = saved;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

inline std::vector<double> finite_diff_loss_grad(const TextPolygon& pred,
                                                 const TextPolygon& gt,
                                                 const BoxLossConfig& cfg,
                                                 double h) {
  if (!(h > 0.0))
    throw std::invalid_argument("finite_diff_loss_grad: h must be positive");
  std::vector<Point2> v = pred.vertices();
  std::vector<double> g(2 * v.size(), 0.0);
  for (std::size_t i = 0; i < 2 * v.size(); ++i) {
    double* coord = (i % 2 == 0) ? &v[i / 2].x : &v[i / 2].y;
    const double saved = *coord;
    *coord = saved + h;
    const double up = box_loss(TextPolygon(v), gt, cfg).total;
    *coord = saved - h;
    const double dn = box_loss(TextPolygon(v), gt, cfg).total;
    *coord = saved;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

}  // namespace textdet
