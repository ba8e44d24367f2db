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
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "textdet/geometry.hpp"

namespace textdet {

struct DetectionRecord {
  std::string image_id;
  TextPolygon polygon;
  double score = 1.0;
};

struct GroundTruthRecord {
  std::string image_id;
  TextPolygon polygon;
  bool ignore = false;
};

struct ImageCounts {
  std::string image_id;
  int matches = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double hmean = 0.0;
  std::vector<ImageCounts> per_image;
};

inline double hmean(double p, double r) {
  if (!(p >= 0.0 && p <= 1.0 && r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("hmean: inputs must lie in [0, 1]");
  if (p + r <= 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

// Exact intersection area for simple polygons, convex or not. Non-convex
// rings use the signed fan decomposition: the ring is split into triangles
// fanned from vertex 0 with orientation signs, and the signed products of
// pairwise triangle clips sum to the true overlap.
inline double intersection_area(const TextPolygon& a, const TextPolygon& b) {
  if (a.is_convex() && b.is_convex()) {
    const auto r = convex_intersection(a, b);
    return r ? polygon_area(*r) : 0.0;
  }
  struct Tri {
    std::array<Point2, 3> p;
    double sign;
  };
  auto fan = [](const TextPolygon& poly) {
    std::vector<Tri> tris;
    const std::vector<Point2>& v = poly.vertices();
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      const double cr = cross(v[i] - v[0], v[i + 1] - v[0]);
      if (std::abs(cr) < 1e-15) continue;
      Tri t{{v[0], v[i], v[i + 1]}, cr > 0.0 ? 1.0 : -1.0};
      if (t.sign < 0.0) std::swap(t.p[1], t.p[2]);
      tris.push_back(t);
    }
    return tris;
  };
  const std::vector<Tri> ta = fan(a);
  const std::vector<Tri> tb = fan(b);
  double total = 0.0;
  for (const Tri& x : ta)
    for (const Tri& y : tb) {
      const TextPolygon px({x.p[0], x.p[1], x.p[2]});
      const TextPolygon py({y.p[0], y.p[1], y.p[2]});
      const auto inter = convex_intersection(px, py);
      if (inter) total += x.sign * y.sign * polygon_area(*inter);
    }
  return std::max(0.0, total);
}

inline double polygon_iou(const TextPolygon& a, const TextPolygon& b) {
  const double inter = intersection_area(a, b);
  const double uni = polygon_area(a) + polygon_area(b) - inter;
  if (uni <= 1e-18) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

// One-to-one greedy matching per image: detections in descending score order
// claim the unmatched ground truth of highest IoU at or above the threshold.
// Detections whose only hit is an ignore-flagged region are dropped from the
// precision denominator; ignore-flagged ground truths never count as misses.
inline EvalReport evaluate(const std::vector<DetectionRecord>& dets,
                           const std::vector<GroundTruthRecord>& gts,
                           double iou_threshold = 0.5) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
    throw std::invalid_argument("evaluate: iou_threshold must lie in (0, 1)");
  for (const DetectionRecord& d : dets)
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0)
      throw std::invalid_argument("evaluate: scores must lie in [0, 1]");

  struct ImageData {
    std::vector<const DetectionRecord*> dets;
    std::vector<const GroundTruthRecord*> gts;
  };
  std::map<std::string, ImageData> images;
  for (const DetectionRecord& d : dets) images[d.image_id].dets.push_back(&d);
  for (const GroundTruthRecord& g : gts) images[g.image_id].gts.push_back(&g);

  EvalReport report;
  long tp_total = 0, fp_total = 0, fn_total = 0;
  for (const auto& [image_id, data] : images) {
    std::vector<const DetectionRecord*> ordered = data.dets;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const DetectionRecord* x, const DetectionRecord* y) {
                       return x->score > y->score;
                     });
    std::vector<bool> taken(data.gts.size(), false);
    int tp = 0, fp = 0;
    for (const DetectionRecord* d : ordered) {
      int best = -1;
      double best_iou = 0.0;
      for (std::size_t j = 0; j < data.gts.size(); ++j) {
        if (taken[j] || data.gts[j]->ignore) continue;
        const double v = polygon_iou(d->polygon, data.gts[j]->polygon);
        if (v >= iou_threshold && v > best_iou) {
          best_iou = v;
          best = static_cast<int>(j);
        }
      }
      if (best >= 0) {
        taken[best] = true;
        ++tp;
        continue;
      }
      bool hits_ignored = false;
      for (std::size_t j = 0; j < data.gts.size() && !hits_ignored; ++j)
        if (data.gts[j]->ignore &&
            polygon_iou(d->polygon, data.gts[j]->polygon) >= iou_threshold)
          hits_ignored = true;
      if (!hits_ignored) ++fp;
    }
    int fn = 0;
    for (std::size_t j = 0; j < data.gts.size(); ++j)
      if (!data.gts[j]->ignore && !taken[j]) ++fn;

    report.per_image.push_back({image_id, tp, fp, fn});
    tp_total += tp;
    fp_total += fp;
    fn_total += fn;
  }

  report.precision = (tp_total + fp_total) > 0
                         ? static_cast<double>(tp_total) / (tp_total + fp_total)
                         : 0.0;
  report.recall = (tp_total + fn_total) > 0
                      ? static_cast<double>(tp_total) / (tp_total + fn_total)
                      : 0.0;
  report.hmean = hmean(report.precision, report.recall);
  return report;
}

}  // namespace textdet
