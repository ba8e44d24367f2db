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

// Release gate for the library: nine numbered end-to-end checks, one
// PASS/FAIL line each, nonzero exit if any fails. Tolerances are pinned
// here on purpose; loosening them is a behavior change, not a cleanup.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "textdet/textdet.hpp"

#ifndef TEXTDET_CLI_PATH
#error "TEXTDET_CLI_PATH must point at the built binary"
#endif

namespace {

using namespace textdet;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

BezierPair straight_band() {
  return BezierPair(BezierCurve({{0, 0}, {1, 0}, {2, 0}, {3, 0}}),
                    BezierCurve({{3, 1}, {2, 1}, {1, 1}, {0, 1}}));
}

BezierPair s_curve_band() {
  return BezierPair(BezierCurve({{0, 0}, {1, 0.6}, {2, 0.1}, {3, 0}}),
                    BezierCurve({{3, 1}, {2, 0.9}, {1, 0.4}, {0, 1}}));
}

// Gently curved side: jittered points along a horizontal baseline, so the
// cubic stays single-valued in x and far from degenerate.
std::array<Point2, 4> mild_cubic(std::mt19937_64& rng, double x_dir,
                                 double y0) {
  std::uniform_real_distribution<double> len(2.5, 4.0);
  std::uniform_real_distribution<double> jit(-0.25, 0.25);
  const double l = len(rng);
  std::array<Point2, 4> c;
  for (int i = 0; i < 4; ++i) {
    c[i] = {x_dir * (l * i / 3.0) + jit(rng) * (i % 3 != 0 ? 1.0 : 0.0),
            y0 + jit(rng)};
  }
  return c;
}

BezierPair mild_band_pair(std::mt19937_64& rng) {
  const std::array<Point2, 4> top = mild_cubic(rng, 1.0, 0.0);
  std::array<Point2, 4> bot = mild_cubic(rng, 1.0, 1.8);
  std::reverse(bot.begin(), bot.end());
  return BezierPair(BezierCurve({top.begin(), top.end()}),
                    BezierCurve({bot.begin(), bot.end()}));
}

BezierPair jittered_band(std::mt19937_64& rng, double jitter) {
  std::uniform_real_distribution<double> jit(-jitter, jitter);
  std::array<double, 16> c{};
  for (int i = 0; i < 4; ++i) {
    c[2 * i] = 4.0 * i / 3.0 + jit(rng);
    c[2 * i + 1] = jit(rng);
    c[8 + 2 * i] = 4.0 - 4.0 * i / 3.0 + jit(rng);
    c[8 + 2 * i + 1] = 1.0 + jit(rng);
  }
  return pair_from_coordinates(c);
}

// --------------------------------------------------------------------- 1

Outcome check_bezier_basis() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::uniform_real_distribution<double> uc(-5.0, 5.0);

  double worst_partition = 0.0;
  for (int n = 0; n <= 10; ++n) {
    for (int k = 0; k < 1000; ++k) {
      const double t = ut(rng);
      double sum = 0.0;
      for (int i = 0; i <= n; ++i) sum += bernstein(i, n, t);
      worst_partition = std::max(worst_partition, std::abs(sum - 1.0));
    }
  }
  if (worst_partition > 1e-12)
    return {false, "partition of unity residual " +
                       fmt("%.3e", worst_partition)};

  double worst_affine = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> ctrl(4);
    for (Point2& p : ctrl) p = {uc(rng), uc(rng)};
    const BezierCurve curve(ctrl);

    const Point2 e0 = bezier_eval(curve, 0.0);
    const Point2 e1 = bezier_eval(curve, 1.0);
    if (distance(e0, ctrl.front()) > 1e-12 ||
        distance(e1, ctrl.back()) > 1e-12)
      return {false, "endpoint interpolation broke"};

    const Point2 a{uc(rng), uc(rng)};
    const Point2 b{uc(rng), uc(rng)};
    const BezierCurve line({a, a + (1.0 / 3.0) * (b - a),
                            a + (2.0 / 3.0) * (b - a), b});
    const std::vector<Point2> hull = convex_hull(ctrl);
    const double m00 = uc(rng) / 2.5, m01 = uc(rng) / 2.5;
    const double m10 = uc(rng) / 2.5, m11 = uc(rng) / 2.5;
    const Point2 shift{uc(rng), uc(rng)};
    auto affine = [&](Point2 p) {
      return Point2{m00 * p.x + m01 * p.y + shift.x,
                    m10 * p.x + m11 * p.y + shift.y};
    };
    std::vector<Point2> mapped(4);
    for (int i = 0; i < 4; ++i) mapped[i] = affine(ctrl[i]);
    const BezierCurve mapped_curve(mapped);

    for (int k = 0; k < 25; ++k) {
      const double t = ut(rng);
      const Point2 lerp = a + t * (b - a);
      if (distance(bezier_eval(line, t), lerp) > 1e-12)
        return {false, "linear precision broke at t " + fmt("%.4f", t)};
      if (!oracle::point_in_convex(hull, bezier_eval(curve, t), 1e-9))
        return {false, "curve escaped the control hull"};
      worst_affine = std::max(
          worst_affine, distance(bezier_eval(mapped_curve, t),
                                 affine(bezier_eval(curve, t))));
    }
  }
  const double elapsed = seconds_since(t0);
  if (worst_affine > 1e-9)
    return {false, "affine equivariance residual " + fmt("%.3e", worst_affine)};
  if (elapsed > 10.0) return {false, fmt("took %.1fs, limit 10s", elapsed)};
  return {true, "partition residual " + fmt("%.1e", worst_partition) +
                    ", affine residual " + fmt("%.1e", worst_affine) +
                    fmt(", %.1fs", elapsed)};
}

// --------------------------------------------------------------------- 2

Outcome check_giou_bounds() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> uc(0.0, 10.0);
  const Point2 shift{3.75, -2.25};
  const double scale = 2.5;

  double worst = 0.0;
  auto note = [&](double v) { worst = std::max(worst, v); };
  for (int trial = 0; trial < 10000; ++trial) {
    double i1, g1, g2, gt1, gs1;
    if (trial % 2 == 0) {
      const TextPolygon a(oracle::random_convex_polygon(rng, 0.0, 10.0));
      const TextPolygon b(oracle::random_convex_polygon(rng, 2.0, 12.0));
      i1 = iou(a, b);
      g1 = giou(a, b);
      g2 = giou(b, a);
      auto moved = [&](const TextPolygon& p, Point2 d, double s) {
        std::vector<Point2> v = p.vertices();
        for (Point2& q : v) q = s * (q + d);
        return TextPolygon(v);
      };
      gt1 = giou(moved(a, shift, 1.0), moved(b, shift, 1.0));
      gs1 = giou(moved(a, shift, scale), moved(b, shift, scale));
      note(std::abs(iou(b, a) - i1));
    } else {
      auto rand_rect = [&] {
        const Point2 p{uc(rng), uc(rng)};
        const Point2 q{uc(rng) + 0.01, uc(rng) + 0.01};
        return AARect({std::min(p.x, q.x), std::min(p.y, q.y)},
                      {std::max(p.x, q.x), std::max(p.y, q.y)});
      };
      const AARect a = rand_rect();
      const AARect b = rand_rect();
      i1 = iou(a, b);
      g1 = giou(a, b);
      g2 = giou(b, a);
      auto moved = [&](const AARect& r, Point2 d, double s) {
        return AARect{s * (r.min() + d), s * (r.max() + d)};
      };
      gt1 = giou(moved(a, shift, 1.0), moved(b, shift, 1.0));
      gs1 = giou(moved(a, shift, scale), moved(b, shift, scale));
      note(std::abs(iou(b, a) - i1));
    }
    if (!(i1 >= 0.0 && i1 <= 1.0)) return {false, "IoU out of [0, 1]"};
    if (!(g1 > -1.0 && g1 <= i1 + 1e-12))
      return {false, "GIoU out of (-1, IoU]"};
    note(std::abs(g1 - g2));
    note(std::abs(gt1 - g1));
    note(std::abs(gs1 - g1));
  }
  if (worst > 1e-9)
    return {false, "symmetry/invariance residual " + fmt("%.3e", worst)};

  double worst_sigmas = 0.0;
  constexpr std::size_t kMcSamples = 1000000;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<Point2> a = oracle::random_convex_polygon(rng, 0.0, 10.0);
    const std::vector<Point2> b = oracle::random_convex_polygon(rng, 2.0, 12.0);
    const auto clipped = convex_intersection(TextPolygon(a), TextPolygon(b));
    const double exact = clipped ? polygon_area(*clipped) : 0.0;
    const oracle::McArea mc = oracle::mc_intersection_area(
        a, b, kMcSamples, 77000 + static_cast<std::uint64_t>(trial));
    std::vector<Point2> both(a);
    both.insert(both.end(), b.begin(), b.end());
    // The few-counts floor covers near-tangent pairs where the normal
    // approximation behind sigma is meaningless.
    const double floor =
        5.0 * enclosing_aarect(both).area() / static_cast<double>(kMcSamples);
    const double err = std::abs(exact - mc.area);
    if (err > std::max({3.0 * mc.sigma, floor, 1e-9}))
      return {false, "MC disagreement " + fmt("%.4f", err) + " vs 3 sigma " +
                         fmt("%.4f", 3.0 * mc.sigma)};
    if (mc.sigma > 0.0) worst_sigmas = std::max(worst_sigmas, err / mc.sigma);
  }
  const double elapsed = seconds_since(t0);
  if (elapsed > 60.0) return {false, fmt("took %.1fs, limit 60s", elapsed)};
  return {true, "invariance residual " + fmt("%.1e", worst) +
                    ", worst MC deviation " + fmt("%.2f", worst_sigmas) +
                    " sigma" + fmt(", %.1fs", elapsed)};
}

// --------------------------------------------------------------------- 3

Outcome check_loss_forms() {
  const double e_minus_1 = std::exp(1.0) - 1.0;
  if (std::abs(smooth_ln(0.0)) > 1e-9) return {false, "smooth_ln(0) != 0"};
  if (std::abs(smooth_ln(e_minus_1) - 1.0) > 1e-9)
    return {false, "smooth_ln(e-1) != 1"};
  const std::vector<double> pm{1.0, -1.0};
  const double expect = 2.0 * (2.0 * std::log(2.0) - 1.0);
  if (std::abs(smooth_ln(pm) - expect) > 1e-9)
    return {false, "smooth_ln((1,-1)) != 2(2ln2 - 1)"};

  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> delta(16);
    for (double& d : delta) d = ud(rng);
    const std::vector<double> analytic = smooth_ln_grad(delta);
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double numeric = oracle::central_diff(
          [](double x) { return smooth_ln(x); }, delta[i], 1e-6);
      worst_rel = std::max(worst_rel, std::abs(analytic[i] - numeric) /
                                          std::max(1.0, std::abs(numeric)));
    }
  }
  if (worst_rel >= 1e-5)
    return {false, "gradient relative error " + fmt("%.3e", worst_rel)};

  BoxLossConfig cfg;
  std::uniform_real_distribution<double> uw(0.1, 6.0);
  double worst_decomp = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const BezierPair gt = jittered_band(rng, 0.3);
    if (box_loss(gt, gt, cfg).total != 0.0)
      return {false, "identical boxes have nonzero loss"};
    BezierPair pred = jittered_band(rng, 0.3);
    BoxLossConfig rcfg;
    rcfg.lambda1 = uw(rng);
    rcfg.lambda2 = uw(rng);
    rcfg.split_mode =
        trial % 2 == 0 ? SplitMode::FullRect : SplitMode::SplitRect3;
    const LossValue v = box_loss(pred, gt, rcfg);
    worst_decomp = std::max(
        worst_decomp,
        std::abs(v.total - (rcfg.lambda1 * v.regression_term +
                            rcfg.lambda2 * v.giou_term)));
    std::array<double, 16> c = pair_coordinates(gt);
    c[trial % 16] += 0.5;
    if (!(box_loss(pair_from_coordinates(c), gt, cfg).total > 0.0))
      return {false, "perturbed box has zero loss"};
  }
  if (worst_decomp > 1e-12)
    return {false, "decomposition residual " + fmt("%.3e", worst_decomp)};
  return {true, "gradient rel err " + fmt("%.1e", worst_rel) +
                    ", decomposition residual " + fmt("%.1e", worst_decomp)};
}

// --------------------------------------------------------------------- 4

Outcome check_split_mechanism() {
  const BezierPair gt = straight_band();
  const BezierPair pred = s_curve_band();

  BoxLossConfig full;
  full.split_mode = SplitMode::FullRect;
  const double full_giou = box_loss(pred, gt, full).giou_term;
  if (std::abs(full_giou) > 1e-12)
    return {false, "full-rect GIoU term " + fmt("%.3e", full_giou) +
                       " is not 0"};

  BoxLossConfig split;
  split.split_mode = SplitMode::SplitRect3;
  const double split_giou = box_loss(pred, gt, split).giou_term;
  if (!(split_giou > 0.05))
    return {false, "split GIoU term " + fmt("%.4f", split_giou) +
                       " not above 0.05"};

  BoxLossConfig giou_only;
  giou_only.lambda1 = 0.0;
  giou_only.lambda2 = 1.0;
  giou_only.split_mode = SplitMode::SplitRect3;
  const std::vector<double> gs = finite_diff_loss_grad(pred, gt, giou_only,
                                                       1e-6);
  double split_grad_max = 0.0;
  for (double g : gs) split_grad_max = std::max(split_grad_max, std::abs(g));
  if (!(split_grad_max > 1e-3))
    return {false, "split-loss gradient is flat (max " +
                       fmt("%.3e", split_grad_max) + ")"};

  giou_only.split_mode = SplitMode::FullRect;
  const std::vector<double> gf = finite_diff_loss_grad(pred, gt, giou_only,
                                                       1e-6);
  double interior_max = 0.0;
  for (std::size_t i : {2u, 3u, 4u, 5u, 10u, 11u, 12u, 13u})
    interior_max = std::max(interior_max, std::abs(gf[i]));
  if (interior_max > 1e-6)
    return {false, "full-rect gradient leaks onto interior controls (" +
                       fmt("%.3e", interior_max) + ")"};
  return {true, "split GIoU term " + fmt("%.4f", split_giou) +
                    ", split grad max " + fmt("%.3f", split_grad_max) +
                    ", full-rect interior grad " + fmt("%.1e", interior_max)};
}

// --------------------------------------------------------------------- 5

Outcome check_hungarian() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> dim(1, 7);
  std::uniform_int_distribution<int> cell(-20, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = dim(rng);
    const int cols = dim(rng);
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    std::vector<double> flat;
    for (auto& row : m)
      for (double& v : row) {
        v = cell(rng);
        flat.push_back(v);
      }
    const Assignment got = hungarian(CostMatrix(rows, cols, flat));
    const double want = oracle::brute_force_assignment(m);
    if (got.total_cost != want)
      return {false, "trial " + std::to_string(trial) + ": cost " +
                         fmt("%.0f", got.total_cost) + " vs brute force " +
                         fmt("%.0f", want)};
  }

  auto timed_solve = [&](int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cells(static_cast<std::size_t>(n) * n);
    for (double& v : cells) v = u(rng);
    const CostMatrix m(n, n, std::move(cells));
    const auto t0 = Clock::now();
    const Assignment a = hungarian(m);
    const double ms = seconds_since(t0) * 1000.0;
    return std::pair<double, double>(ms, a.total_cost);
  };
  const auto [ms300, cost300] = timed_solve(300);
  if (ms300 >= 250.0)
    return {false, fmt("300x300 took %.0fms, limit 250ms", ms300)};
  const auto [ms512, cost512] = timed_solve(512);
  if (ms512 >= 1000.0)
    return {false, fmt("512x512 took %.0fms, limit 1000ms", ms512)};
  (void)cost300;
  (void)cost512;
  return {true, "1000 exact matches" + fmt(", 300x300 %.0fms", ms300) +
                    fmt(", 512x512 %.0fms", ms512)};
}

// --------------------------------------------------------------------- 6

Outcome check_conversions() {
  const TextPolygon quad(
      std::vector<Point2>{{0, 0}, {10, 0}, {10, 5}, {0, 5}});
  const TextPolygon sampled = sample_polygon(quad_to_bezier_pair(quad), 10);
  for (int k = 0; k < 10; ++k) {
    const Point2 top = sampled.vertices()[k];
    const Point2 bot = sampled.vertices()[10 + k];
    if (std::abs(top.y) > 1e-9 || std::abs(bot.y - 5.0) > 1e-9 ||
        std::abs(top.x - 10.0 * k / 9.0) > 1e-9)
      return {false, "straight edges bent during the round trip"};
  }

  std::mt19937_64 rng(606);
  double worst_refit = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const BezierPair pair = mild_band_pair(rng);
    const TextPolygon dense = sample_polygon(pair, 40);
    const BezierPair refit = polygon_to_bezier_pair(dense);
    const std::array<double, 16> want = pair_coordinates(pair);
    const std::array<double, 16> got = pair_coordinates(refit);
    for (std::size_t i = 0; i < 16; ++i)
      worst_refit = std::max(worst_refit, std::abs(want[i] - got[i]));
  }
  if (worst_refit > 1e-4)
    return {false, "refit control error " + fmt("%.3e", worst_refit)};

  const BezierPair curved = s_curve_band();
  std::vector<Point2> dense_ring = sample_polygon(curved, 200).vertices();
  const double err8 =
      oracle::hausdorff_rings(sample_polygon(curved, 4).vertices(),
                              dense_ring);
  const double err20 =
      oracle::hausdorff_rings(sample_polygon(curved, 10).vertices(),
                              dense_ring);
  if (!(err8 > err20))
    return {false, "8-point sampling not worse than 20-point"};
  return {true, "refit control error " + fmt("%.1e", worst_refit) +
                    ", boundary error 8pt " + fmt("%.4f", err8) + " vs 20pt " +
                    fmt("%.4f", err20)};
}

// --------------------------------------------------------------------- 7

Outcome check_evaluation() {
  auto box = [](double x0, double y0, double w, double h) {
    return TextPolygon(std::vector<Point2>{
        {x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}});
  };
  {
    const EvalReport r = evaluate({{"img", box(0, 0, 2, 1), 0.9}},
                                  {{"img", box(0, 0, 2, 1), false}}, 0.5);
    if (r.precision != 1.0 || r.recall != 1.0 || r.hmean != 1.0)
      return {false, "single match fixture broke"};
  }
  {
    const EvalReport r = evaluate(
        {{"img", box(0, 0, 2, 1), 0.9}, {"img", box(0.05, 0, 2, 1), 0.8}},
        {{"img", box(0, 0, 2, 1), false}}, 0.5);
    if (r.precision != 0.5 || r.recall != 1.0 || r.hmean != 2.0 / 3.0)
      return {false, "duplicate detection fixture broke"};
  }

  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::uniform_real_distribution<double> size(1.4, 2.0);
  for (int scene = 0; scene < 30; ++scene) {
    std::vector<GroundTruthRecord> gts;
    std::vector<DetectionRecord> dets;
    const int n = 4 + scene % 4;
    for (int i = 0; i < n; ++i) {
      // Grid pitch 4 with boxes no wider than 2.2, so each detection can
      // only ever overlap its own ground truth.
      const double x = 4.0 * (i % 3);
      const double y = 4.0 * (i / 3);
      gts.push_back({"img", box(x, y, 2, 2), false});
      dets.push_back(
          {"img", box(x + jitter(rng), y + jitter(rng), size(rng), size(rng)),
           0.5 + 0.4 * jitter(rng)});
    }
    const EvalReport base = evaluate(dets, gts, 0.3);
    if (base.precision != 1.0 || base.recall != 1.0)
      return {false, "loose-threshold scene did not fully match"};
    std::vector<DetectionRecord> with_dup = dets;
    with_dup.push_back({"img", box(0, 0, 2, 2), 0.95});
    with_dup.push_back({"img", box(0.01, 0.01, 2, 2), 0.2});
    const EvalReport dup = evaluate(with_dup, gts, 0.3);
    if (!(dup.precision < base.precision) || dup.recall != base.recall)
      return {false, "duplicate detections improved the score"};
    double prev_matches = 1e9;
    for (double thr : {0.3, 0.5, 0.7, 0.9}) {
      const EvalReport r = evaluate(dets, gts, thr);
      double total = 0.0;
      for (const auto& row : r.per_image) total += row.matches;
      if (total > prev_matches)
        return {false, "match count rose with a stricter threshold"};
      prev_matches = total;
    }
  }
  return {true, "exact fixtures and 30 randomized scenes hold"};
}

// --------------------------------------------------------------------- 8

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args, const fs::path& dir, int idx) {
  const fs::path out_file = dir / ("out_" + std::to_string(idx) + ".txt");
  const std::string cmd = std::string(TEXTDET_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out_file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, std::move(ss).str()};
}

Outcome check_cli_pipeline() {
  const auto t0 = Clock::now();
  const fs::path dir = fs::temp_directory_path() / "textdet_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path txt = dir / "gt.txt";
  {
    std::ofstream out(txt, std::ios::binary);
    out << "0,0,100,0,100,30,0,30,hello\n"
           "0,60,120,60,120,100,0,100,###\n"
           "200,0,320,0,320,40,200,40,world\n";
  }
  const fs::path json1 = dir / "gt1.json";
  const fs::path json2 = dir / "gt2.json";
  const std::string conv = "convert " + txt.string() +
                           " --from icdar15 --image-id img1 ";
  int idx = 0;
  if (run_cli(conv + json1.string(), dir, idx++).exit_code != 0)
    return {false, "convert exited nonzero"};
  if (run_cli(conv + json2.string(), dir, idx++).exit_code != 0)
    return {false, "second convert exited nonzero"};
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
  };
  if (slurp(json1) != slurp(json2))
    return {false, "convert output bytes differ between runs"};

  const fs::path bez = dir / "gt_bez.json";
  if (run_cli("convert " + json1.string() + " " + bez.string() +
                  " --to bezier16",
              dir, idx++)
          .exit_code != 0)
    return {false, "representation conversion exited nonzero"};

  const CliRun loss = run_cli(
      "--json loss " + bez.string() + " " + bez.string(), dir, idx++);
  if (loss.exit_code != 0) return {false, "loss exited nonzero"};
  if (loss.out.find("\"total\":0.0") == std::string::npos ||
      loss.out.find("\"mean\":{\"giou\":0.0") == std::string::npos)
    return {false, "self-loss is not all zero: " + loss.out};

  const CliRun ev = run_cli(
      "--json evaluate " + json1.string() + " " + json1.string(), dir, idx++);
  if (ev.exit_code != 0) return {false, "evaluate exited nonzero"};
  if (ev.out.find("\"hmean\":1.0") == std::string::npos)
    return {false, "self-evaluation is not perfect: " + ev.out};

  const double elapsed = seconds_since(t0);
  if (elapsed > 30.0) return {false, fmt("took %.1fs, limit 30s", elapsed)};
  return {true, "convert/loss/evaluate pipeline deterministic" +
                    fmt(", %.1fs", elapsed)};
}

// --------------------------------------------------------------------- 9

Outcome check_throughput() {
  std::mt19937_64 rng(909);
  std::vector<std::pair<BezierPair, BezierPair>> cases;
  for (int i = 0; i < 512; ++i)
    cases.emplace_back(jittered_band(rng, 0.3), jittered_band(rng, 0.3));
  BoxLossConfig cfg;
  cfg.split_mode = SplitMode::SplitRect3;

  double checksum = 0.0;
  for (const auto& [p, g] : cases) checksum += box_loss(p, g, cfg).total;

  const int evals = 20000;
  const auto t0 = Clock::now();
  for (int i = 0; i < evals; ++i) {
    const auto& [p, g] = cases[static_cast<std::size_t>(i) % cases.size()];
    checksum += box_loss(p, g, cfg).total;
  }
  const double elapsed = seconds_since(t0);
  const double rate = evals / elapsed;
  volatile double sink = checksum;
  (void)sink;
  if (rate < 1e4)
    return {false, fmt("%.0f split-GIoU evals/s, need 10000", rate)};
  return {true, fmt("%.0f split-GIoU evals/s single-threaded", rate)};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"bernstein/bezier basis properties", check_bezier_basis},
      {"IoU/GIoU bounds, symmetry, invariances, MC agreement",
       check_giou_bounds},
      {"regression loss closed forms and gradients", check_loss_forms},
      {"split-GIoU curvature sensitivity", check_split_mechanism},
      {"assignment optimality and solve times", check_hungarian},
      {"representation conversion round trips", check_conversions},
      {"evaluation protocol fixtures and properties", check_evaluation},
      {"command-line pipeline end to end", check_cli_pipeline},
      {"split-GIoU loss throughput", check_throughput},
  };
  int failures = 0;
  int index = 0;
  for (const Entry& e : entries) {
    ++index;
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.ok) ++failures;
    std::printf("%s  %d. %s (%s)\n", o.ok ? "PASS" : "FAIL", index, e.name,
                o.detail.c_str());
  }
  if (failures > 0) {
    std::printf("%d of 9 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
