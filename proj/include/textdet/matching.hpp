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
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "textdet/losses.hpp"

namespace textdet {

class CostMatrix {
 public:
  CostMatrix(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (rows_ < 1 || cols_ < 1)
      throw std::invalid_argument("CostMatrix: need at least one row and col");
    if (values_.size() != static_cast<std::size_t>(rows_) * cols_)
      throw std::invalid_argument("CostMatrix: value count must be rows*cols");
    for (double v : values_)
      if (!std::isfinite(v))
        throw std::invalid_argument("CostMatrix: cells must be finite");
  }

  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows[0].empty())
      throw std::invalid_argument("CostMatrix: need at least one row and col");
    std::vector<double> flat;
    flat.reserve(rows.size() * rows[0].size());
    for (const auto& r : rows) {
      if (r.size() != rows[0].size())
        throw std::invalid_argument("CostMatrix: ragged rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return CostMatrix(static_cast<int>(rows.size()),
                      static_cast<int>(rows[0].size()), std::move(flat));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double at(int r, int c) const {
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> values_;
};

struct Assignment {
  std::vector<std::pair<int, int>> pairs;
  double total_cost = 0.0;
};

// Minimum-cost one-to-one assignment (shortest augmenting paths with
// potentials, O(n^3)). Rectangular inputs are padded to square with a large
// sentinel cost; sentinel pairs are stripped from the result.
inline Assignment hungarian(const CostMatrix& c) {
  const int n = std::max(c.rows(), c.cols());
  double max_abs = 0.0;
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j)
      max_abs = std::max(max_abs, std::abs(c.at(i, j)));
  const double sentinel = 1e6 * std::max(1.0, max_abs);
  auto cell = [&](int i, int j) {
    return (i < c.rows() && j < c.cols()) ? c.at(i, j) : sentinel;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          const double cur = cell(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment out;
  for (int j = 1; j <= n; ++j) {
    const int i = p[j] - 1;
    if (i < c.rows() && j - 1 < c.cols()) {
      out.pairs.emplace_back(i, j - 1);
      out.total_cost += c.at(i, j - 1);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

// DETR-style pairwise cost: class term plus combined box loss.
template <typename Box>
double matching_cost(double pred_class_prob, const Box& pred_box,
                     const Box& gt_box, const BoxLossConfig& cfg,
                     double class_weight = 1.0) {
  if (!(pred_class_prob >= 0.0 && pred_class_prob <= 1.0))
    throw std::invalid_argument(
        "matching_cost: class probability must lie in [0, 1]");
  return class_weight * (-pred_class_prob) +
         box_loss(pred_box, gt_box, cfg).total;
}

template <typename Box>
Assignment match_sets(const std::vector<std::pair<double, Box>>& preds,
                      const std::vector<Box>& gts, const BoxLossConfig& cfg,
                      double class_weight = 1.0) {
  if (gts.empty()) return {};
  if (preds.size() < gts.size())
    throw std::invalid_argument(
        "match_sets: need at least as many predictions as ground truths");
  std::vector<double> values;
  values.reserve(preds.size() * gts.size());
  for (const auto& [prob, box] : preds)
    for (const Box& gt : gts)
      values.push_back(matching_cost(prob, box, gt, cfg, class_weight));
  return hungarian(CostMatrix(static_cast<int>(preds.size()),
                              static_cast<int>(gts.size()),
                              std::move(values)));
}

}  // namespace textdet
