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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "textdet/textdet.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct CliError {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot open '" + path + "' for reading"};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw CliError{kExitIo, "read failed for '" + path + "'"};
  return std::move(ss).str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{kExitIo, "cannot open '" + path + "' for writing"};
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw CliError{kExitIo, "write failed for '" + path + "'"};
}

struct Options {
  std::string config_path;
  bool json_out = false;
  int n_v = 10;
  double iou_threshold = 0.5;
  std::string split_mode = "full";
  double lambda1 = 5.0;
  double lambda2 = 2.0;
  double class_weight = 1.0;
  std::uint64_t seed = 0;
  std::string output_path;
};

textdet::SplitMode parse_split_mode(const std::string& s) {
  if (s == "full") return textdet::SplitMode::FullRect;
  if (s == "rect3") return textdet::SplitMode::SplitRect3;
  if (s == "rrect3") return textdet::SplitMode::SplitRotatedRect3;
  throw CliError{kExitUsage, "invalid split_mode '" + s +
                                 "': expected full, rect3, or rrect3"};
}

textdet::BoxLossConfig loss_config(const Options& o) {
  textdet::BoxLossConfig cfg;
  cfg.lambda1 = o.lambda1;
  cfg.lambda2 = o.lambda2;
  cfg.split_mode = parse_split_mode(o.split_mode);
  cfg.reduction = textdet::Reduction::Sum;
  return cfg;
}

void validate_options(const Options& o) {
  if (!(std::isfinite(o.lambda1) && o.lambda1 >= 0.0))
    throw CliError{kExitUsage, "invalid lambda1: must be finite and >= 0"};
  if (!(std::isfinite(o.lambda2) && o.lambda2 >= 0.0))
    throw CliError{kExitUsage, "invalid lambda2: must be finite and >= 0"};
  if (!(std::isfinite(o.class_weight)))
    throw CliError{kExitUsage, "invalid class_weight: must be finite"};
  if (!(o.iou_threshold > 0.0 && o.iou_threshold < 1.0))
    throw CliError{kExitUsage,
                   "invalid iou_threshold: must lie strictly between 0 and 1"};
  if (o.n_v < 2)
    throw CliError{kExitUsage, "invalid n_v: need at least 2 samples per side"};
  parse_split_mode(o.split_mode);
}

void apply_config_file(Options& o,
                       const std::unordered_map<std::string, bool>& on_cli) {
  if (o.config_path.empty()) return;
  json j;
  try {
    j = json::parse(read_file(o.config_path));
  } catch (const json::parse_error& e) {
    throw CliError{kExitUsage, std::string("invalid config: ") + e.what()};
  }
  if (!j.is_object())
    throw CliError{kExitUsage, "invalid config: expected a JSON object"};
  auto flag_set = [&](const char* key) {
    auto it = on_cli.find(key);
    return it != on_cli.end() && it->second;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    auto as_number = [&](double& dst) {
      if (!it->is_number())
        throw CliError{kExitUsage,
                       "invalid config field '" + key + "': expected a number"};
      dst = it->get<double>();
    };
    if (key == "lambda1") {
      if (!flag_set("lambda1")) as_number(o.lambda1);
    } else if (key == "lambda2") {
      if (!flag_set("lambda2")) as_number(o.lambda2);
    } else if (key == "class_weight") {
      if (!flag_set("class_weight")) as_number(o.class_weight);
    } else if (key == "iou_threshold") {
      if (!flag_set("iou_threshold")) as_number(o.iou_threshold);
    } else if (key == "n_v") {
      if (!it->is_number_integer())
        throw CliError{kExitUsage,
                       "invalid config field 'n_v': expected an integer"};
      if (!flag_set("n_v")) o.n_v = it->get<int>();
    } else if (key == "seed") {
      if (!it->is_number_unsigned() && !it->is_number_integer())
        throw CliError{kExitUsage,
                       "invalid config field 'seed': expected an integer"};
      if (!flag_set("seed")) o.seed = it->get<std::uint64_t>();
    } else if (key == "split_mode") {
      if (!it->is_string())
        throw CliError{kExitUsage,
                       "invalid config field 'split_mode': expected a string"};
      if (!flag_set("split_mode")) o.split_mode = it->get<std::string>();
    } else if (key == "output_path") {
      if (!it->is_string())
        throw CliError{kExitUsage,
                       "invalid config field 'output_path': expected a string"};
      if (!flag_set("output_path")) o.output_path = it->get<std::string>();
    } else {
      throw CliError{kExitUsage, "unknown config field '" + key + "'"};
    }
  }
}

textdet::AnnotationSet load_annotation_json(const std::string& path) {
  const std::string bytes = read_file(path);
  try {
    return textdet::parse_canonical_json(bytes);
  } catch (const std::exception& e) {
    throw CliError{kExitData, path + ": " + e.what()};
  }
}

std::size_t count_instances(const textdet::AnnotationSet& set) {
  std::size_t n = 0;
  for (const auto& img : set.images) n += img.instances.size();
  return n;
}

// Boundary polygon used for evaluation and rrect3 losses: curves are
// sampled at n_v points per side, flat shapes pass through directly.
textdet::TextPolygon eval_polygon(const textdet::Instance& inst, int n_v) {
  if (inst.repr == textdet::Repr::Bezier16)
    return textdet::sample_polygon(textdet::instance_bezier_pair(inst), n_v);
  return textdet::instance_polygon(inst);
}

// ---------------------------------------------------------------- convert

struct ConvertArgs {
  std::string input;
  std::string output;
  std::string from = "json";
  std::string to = "none";
  std::string image_id;
  int in_vertices = 0;
  int width = 0;
  int height = 0;
};

int cmd_convert(const Options& o, const ConvertArgs& a) {
  std::string out_path = a.output.empty() ? o.output_path : a.output;
  if (out_path.empty())
    throw CliError{kExitUsage, "invalid output_path: no output file given"};

  textdet::AnnotationSet set;
  if (a.from == "json") {
    set = load_annotation_json(a.input);
  } else {
    const std::string text = read_file(a.input);
    std::vector<textdet::Instance> instances;
    try {
      if (a.from == "icdar15") {
        instances = textdet::parse_icdar15(text);
      } else if (a.from == "poly") {
        if (a.in_vertices < 3)
          throw CliError{kExitUsage,
                         "invalid in_vertices: --from poly needs "
                         "--in-vertices >= 3"};
        instances = textdet::parse_polygon_lines(text, a.in_vertices);
      } else {
        throw CliError{kExitUsage, "invalid from '" + a.from +
                                       "': expected icdar15, poly, or json"};
      }
    } catch (const std::runtime_error& e) {
      throw CliError{kExitData, a.input + ": " + e.what()};
    }
    textdet::ImageAnnotations img;
    img.id = a.image_id.empty()
                 ? std::filesystem::path(a.input).stem().string()
                 : a.image_id;
    img.width = a.width;
    img.height = a.height;
    img.instances = std::move(instances);
    set.images.push_back(std::move(img));
  }

  std::vector<textdet::ConversionFailure> failures;
  if (a.to != "none") {
    textdet::ConversionTarget target;
    if (a.to == "bezier16") {
      target = textdet::ConversionTarget::bezier16();
    } else if (a.to == "polygon") {
      target = textdet::ConversionTarget::polygon(2 * o.n_v);
    } else {
      throw CliError{kExitUsage, "invalid to '" + a.to +
                                     "': expected none, bezier16, or polygon"};
    }
    try {
      textdet::ConversionReport report =
          textdet::convert_representation(set, target);
      set = std::move(report.set);
      failures = std::move(report.failures);
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitData, a.input + ": " + e.what()};
    }
  }

  std::string bytes;
  try {
    bytes = textdet::to_canonical_json(set);
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitData, a.input + ": " + e.what()};
  }
  write_file(out_path, bytes);

  if (o.json_out) {
    json jf = json::array();
    for (const auto& f : failures) {
      jf.push_back({{"image_id", f.image_id},
                    {"instance_index", f.instance_index},
                    {"message", f.message}});
    }
    json summary{{"output", out_path},
                 {"images", set.images.size()},
                 {"instances", count_instances(set)},
                 {"failures", std::move(jf)}};
    std::printf("%s\n", summary.dump().c_str());
  } else {
    std::printf("wrote %s: %zu images, %zu instances, %zu conversion failures\n",
                out_path.c_str(), set.images.size(), count_instances(set),
                failures.size());
    for (const auto& f : failures) {
      std::fprintf(stderr, "  %s[%zu]: %s\n", f.image_id.c_str(),
                   f.instance_index, f.message.c_str());
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------- loss

std::map<std::string, const textdet::ImageAnnotations*> by_image_id(
    const textdet::AnnotationSet& set) {
  std::map<std::string, const textdet::ImageAnnotations*> out;
  for (const auto& img : set.images) out.emplace(img.id, &img);
  return out;
}

textdet::LossValue instance_loss(const textdet::Instance& pred,
                                 const textdet::Instance& gt, const Options& o,
                                 const textdet::BoxLossConfig& cfg) {
  if (cfg.split_mode == textdet::SplitMode::SplitRotatedRect3) {
    const textdet::TextPolygon pp =
        textdet::sample_polygon(textdet::instance_to_bezier_pair(pred), o.n_v);
    const textdet::TextPolygon gp =
        textdet::sample_polygon(textdet::instance_to_bezier_pair(gt), o.n_v);
    return textdet::box_loss(pp, gp, cfg);
  }
  if (cfg.split_mode == textdet::SplitMode::FullRect &&
      pred.repr != textdet::Repr::Bezier16 &&
      gt.repr != textdet::Repr::Bezier16 &&
      pred.coords.size() == gt.coords.size()) {
    return textdet::box_loss(textdet::instance_polygon(pred),
                             textdet::instance_polygon(gt), cfg);
  }
  return textdet::box_loss(textdet::instance_to_bezier_pair(pred),
                           textdet::instance_to_bezier_pair(gt), cfg);
}

struct LossRow {
  std::string image_id;
  std::size_t index;
  textdet::LossValue value;
};

int cmd_loss(const Options& o, const std::string& pred_path,
             const std::string& gt_path) {
  const textdet::BoxLossConfig cfg = loss_config(o);
  if (cfg.split_mode == textdet::SplitMode::SplitRotatedRect3 && o.n_v != 10)
    throw CliError{kExitUsage,
                   "invalid n_v: split_mode rrect3 requires n_v = 10"};

  const textdet::AnnotationSet pred_set = load_annotation_json(pred_path);
  const textdet::AnnotationSet gt_set = load_annotation_json(gt_path);
  const auto preds = by_image_id(pred_set);
  const auto gts = by_image_id(gt_set);

  std::vector<std::string> misaligned;
  for (const auto& [id, img] : preds) {
    auto it = gts.find(id);
    if (it == gts.end() ||
        it->second->instances.size() != img->instances.size())
      misaligned.push_back(id);
  }
  for (const auto& [id, img] : gts)
    if (!preds.contains(id)) misaligned.push_back(id);
  if (!misaligned.empty()) {
    std::sort(misaligned.begin(), misaligned.end());
    std::string joined;
    for (const auto& id : misaligned)
      joined += (joined.empty() ? "" : ", ") + id;
    throw CliError{kExitData,
                   "instance alignment failed for image ids: " + joined};
  }

  std::vector<LossRow> rows;
  for (const auto& [id, pimg] : preds) {
    const textdet::ImageAnnotations* gimg = gts.at(id);
    for (std::size_t k = 0; k < pimg->instances.size(); ++k) {
      try {
        rows.push_back({id, k,
                        instance_loss(pimg->instances[k], gimg->instances[k],
                                      o, cfg)});
      } catch (const std::exception& e) {
        throw CliError{kExitData, "image '" + id + "' instance " +
                                      std::to_string(k) + ": " + e.what()};
      }
    }
  }

  textdet::LossValue mean{};
  for (const LossRow& r : rows) {
    mean.total += r.value.total;
    mean.regression_term += r.value.regression_term;
    mean.giou_term += r.value.giou_term;
  }
  if (!rows.empty()) {
    mean.total /= static_cast<double>(rows.size());
    mean.regression_term /= static_cast<double>(rows.size());
    mean.giou_term /= static_cast<double>(rows.size());
  }

  if (o.json_out) {
    json jrows = json::array();
    for (const LossRow& r : rows) {
      jrows.push_back({{"image_id", r.image_id},
                       {"index", r.index},
                       {"total", r.value.total},
                       {"regression", r.value.regression_term},
                       {"giou", r.value.giou_term}});
    }
    json out{{"rows", std::move(jrows)},
             {"mean",
              {{"total", mean.total},
               {"regression", mean.regression_term},
               {"giou", mean.giou_term}}}};
    std::printf("%s\n", out.dump().c_str());
  } else {
    std::printf("%-20s %5s %14s %14s %14s\n", "image_id", "index", "total",
                "regression", "giou");
    for (const LossRow& r : rows) {
      std::printf("%-20s %5zu %14.6f %14.6f %14.6f\n", r.image_id.c_str(),
                  r.index, r.value.total, r.value.regression_term,
                  r.value.giou_term);
    }
    std::printf("%-20s %5s %14.6f %14.6f %14.6f\n", "mean", "-", mean.total,
                mean.regression_term, mean.giou_term);
  }
  return kExitOk;
}

// --------------------------------------------------------------- evaluate

int cmd_evaluate(const Options& o, const std::string& det_path,
                 const std::string& gt_path) {
  const textdet::AnnotationSet det_set = load_annotation_json(det_path);
  const textdet::AnnotationSet gt_set = load_annotation_json(gt_path);

  std::vector<textdet::DetectionRecord> dets;
  std::vector<textdet::GroundTruthRecord> gts;
  try {
    for (const auto& img : det_set.images)
      for (const auto& inst : img.instances)
        dets.push_back(
            {img.id, eval_polygon(inst, o.n_v), inst.score.value_or(1.0)});
    for (const auto& img : gt_set.images)
      for (const auto& inst : img.instances)
        gts.push_back({img.id, eval_polygon(inst, o.n_v), inst.ignore});
  } catch (const std::exception& e) {
    throw CliError{kExitData, e.what()};
  }

  textdet::EvalReport report;
  try {
    report = textdet::evaluate(dets, gts, o.iou_threshold);
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitData, e.what()};
  }

  if (o.json_out) {
    json per = json::array();
    for (const auto& row : report.per_image) {
      per.push_back({{"image_id", row.image_id},
                     {"matches", row.matches},
                     {"false_positives", row.false_positives},
                     {"false_negatives", row.false_negatives}});
    }
    json out{{"precision", report.precision},
             {"recall", report.recall},
             {"hmean", report.hmean},
             {"per_image", std::move(per)}};
    std::printf("%s\n", out.dump().c_str());
  } else {
    std::printf("%-20s %8s %10s %10s\n", "image_id", "matches", "false_pos",
                "false_neg");
    for (const auto& row : report.per_image) {
      std::printf("%-20s %8d %10d %10d\n", row.image_id.c_str(), row.matches,
                  row.false_positives, row.false_negatives);
    }
    std::printf("precision=%.6f recall=%.6f hmean=%.6f\n", report.precision,
                report.recall, report.hmean);
  }
  return kExitOk;
}

// ------------------------------------------------------------------ match

struct MatchArgs {
  std::string matrix_path;
  std::string pred_path;
  std::string gt_path;
};

json assignment_json(const textdet::Assignment& a) {
  json pairs = json::array();
  for (const auto& [r, c] : a.pairs) pairs.push_back({r, c});
  return json{{"pairs", std::move(pairs)}, {"total_cost", a.total_cost}};
}

void print_assignment_human(const std::string& label,
                            const textdet::Assignment& a) {
  std::printf("%s:", label.c_str());
  for (const auto& [r, c] : a.pairs) std::printf(" (%d,%d)", r, c);
  std::printf(" total_cost=%.6f\n", a.total_cost);
}

int cmd_match(const Options& o, const MatchArgs& a) {
  const textdet::BoxLossConfig cfg = loss_config(o);
  if (!a.matrix_path.empty()) {
    json j;
    try {
      j = json::parse(read_file(a.matrix_path));
    } catch (const json::parse_error& e) {
      throw CliError{kExitData, a.matrix_path + ": " + e.what()};
    }
    if (!j.is_array() || j.empty())
      throw CliError{kExitData,
                     a.matrix_path + ": expected a non-empty 2D array"};
    std::vector<std::vector<double>> rows;
    for (const auto& jr : j) {
      if (!jr.is_array())
        throw CliError{kExitData, a.matrix_path + ": expected array rows"};
      std::vector<double> row;
      for (const auto& v : jr) {
        if (!v.is_number())
          throw CliError{kExitData, a.matrix_path + ": expected numeric cells"};
        row.push_back(v.get<double>());
      }
      rows.push_back(std::move(row));
    }
    textdet::Assignment asg;
    try {
      asg = textdet::hungarian(textdet::CostMatrix::from_rows(rows));
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitData, a.matrix_path + ": " + e.what()};
    }
    if (o.json_out) {
      std::printf("%s\n", assignment_json(asg).dump().c_str());
    } else {
      print_assignment_human("assignment", asg);
    }
    return kExitOk;
  }

  if (a.pred_path.empty() || a.gt_path.empty())
    throw CliError{kExitUsage,
                   "match needs either --matrix or both --pred and --gt"};
  if (cfg.split_mode == textdet::SplitMode::SplitRotatedRect3 && o.n_v != 10)
    throw CliError{kExitUsage,
                   "invalid n_v: split_mode rrect3 requires n_v = 10"};
  const textdet::AnnotationSet pred_set = load_annotation_json(a.pred_path);
  const textdet::AnnotationSet gt_set = load_annotation_json(a.gt_path);
  const auto preds = by_image_id(pred_set);
  const auto gts = by_image_id(gt_set);

  json jout = json::array();
  for (const auto& [id, gimg] : gts) {
    auto it = preds.find(id);
    if (it == preds.end())
      throw CliError{kExitData, "no predictions for image id '" + id + "'"};
    const textdet::ImageAnnotations* pimg = it->second;
    textdet::Assignment asg;
    try {
      if (cfg.split_mode == textdet::SplitMode::SplitRotatedRect3) {
        std::vector<std::pair<double, textdet::TextPolygon>> pv;
        std::vector<textdet::TextPolygon> gv;
        for (const auto& inst : pimg->instances)
          pv.emplace_back(inst.score.value_or(1.0),
                          textdet::sample_polygon(
                              textdet::instance_to_bezier_pair(inst), o.n_v));
        for (const auto& inst : gimg->instances)
          gv.push_back(textdet::sample_polygon(
              textdet::instance_to_bezier_pair(inst), o.n_v));
        asg = textdet::match_sets(pv, gv, cfg, o.class_weight);
      } else {
        std::vector<std::pair<double, textdet::BezierPair>> pv;
        std::vector<textdet::BezierPair> gv;
        for (const auto& inst : pimg->instances)
          pv.emplace_back(inst.score.value_or(1.0),
                          textdet::instance_to_bezier_pair(inst));
        for (const auto& inst : gimg->instances)
          gv.push_back(textdet::instance_to_bezier_pair(inst));
        asg = textdet::match_sets(pv, gv, cfg, o.class_weight);
      }
    } catch (const std::exception& e) {
      throw CliError{kExitData, "image '" + id + "': " + e.what()};
    }
    if (o.json_out) {
      json entry = assignment_json(asg);
      entry["image_id"] = id;
      jout.push_back(std::move(entry));
    } else {
      print_assignment_human(id, asg);
    }
  }
  if (o.json_out) std::printf("%s\n", json{{"images", jout}}.dump().c_str());
  return kExitOk;
}

// -------------------------------------------------------------- gradcheck

textdet::BezierPair random_band_pair(std::mt19937_64& rng, double jitter) {
  std::uniform_real_distribution<double> jit(-jitter, jitter);
  std::array<double, 16> c{};
  for (int i = 0; i < 4; ++i) {
    c[2 * i] = 4.0 * i / 3.0 + jit(rng);
    c[2 * i + 1] = 0.0 + jit(rng);
    c[8 + 2 * i] = 4.0 - 4.0 * i / 3.0 + jit(rng);
    c[8 + 2 * i + 1] = 1.0 + jit(rng);
  }
  return textdet::pair_from_coordinates(c);
}

int cmd_gradcheck(const Options& o, int trials, bool corrupt) {
  if (trials < 1)
    throw CliError{kExitUsage, "invalid trials: must be >= 1"};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> delta_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> weight_dist(0.5, 5.0);
  std::uniform_real_distribution<double> perturb_dist(-0.8, 0.8);
  const double h = 1e-6;

  double worst = 0.0;
  std::string worst_desc = "none";
  auto consider = [&](double analytic, double numeric, int trial,
                      const char* stage, std::size_t coord) {
    const double rel = std::abs(analytic - numeric) /
                       std::max(1.0, std::abs(numeric));
    if (rel > worst) {
      worst = rel;
      worst_desc = std::string(stage) + " trial " + std::to_string(trial) +
                   " coord " + std::to_string(coord);
    }
  };

  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> delta(16);
    for (double& d : delta) d = delta_dist(rng);
    std::vector<double> analytic = textdet::smooth_ln_grad(delta);
    if (corrupt) analytic[0] += 1e-3;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double numeric =
          (textdet::smooth_ln(delta[i] + h) - textdet::smooth_ln(delta[i] - h)) /
          (2.0 * h);
      consider(analytic[i], numeric, trial, "smooth_ln", i);
    }

    const textdet::BezierPair gt = random_band_pair(rng, 0.3);
    std::array<double, 16> pc = textdet::pair_coordinates(gt);
    std::vector<double> diff(16);
    for (std::size_t i = 0; i < 16; ++i) {
      const double p = perturb_dist(rng);
      pc[i] += p;
      diff[i] = p;
    }
    const textdet::BezierPair pred = textdet::pair_from_coordinates(pc);
    textdet::BoxLossConfig cfg;
    cfg.lambda1 = weight_dist(rng);
    cfg.lambda2 = 0.0;
    cfg.split_mode = textdet::SplitMode::FullRect;
    cfg.reduction = textdet::Reduction::Sum;
    const std::vector<double> fd =
        textdet::finite_diff_loss_grad(pred, gt, cfg, h);
    std::vector<double> reg_analytic = textdet::smooth_ln_grad(diff);
    for (std::size_t i = 0; i < 16; ++i) {
      double a = cfg.lambda1 * reg_analytic[i];
      if (corrupt) a += 1e-3;
      consider(a, fd[i], trial, "box_loss", i);
    }
  }

  const bool pass = worst < 1e-5;
  if (o.json_out) {
    json out{{"trials", trials},
             {"worst_relative_discrepancy", worst},
             {"worst_case", worst_desc},
             {"pass", pass},
             {"seed", o.seed}};
    std::printf("%s\n", out.dump().c_str());
  } else {
    std::printf(
        "gradcheck: %d trials, worst relative discrepancy %.3e (%s), seed "
        "%llu -> %s\n",
        trials, worst, worst_desc.c_str(),
        static_cast<unsigned long long>(o.seed), pass ? "PASS" : "FAIL");
  }
  return pass ? kExitOk : kExitData;
}

// ------------------------------------------------------------------ bench

int cmd_bench(const Options& o, int size, int repeats) {
  if (size < 1) throw CliError{kExitUsage, "invalid size: must be >= 1"};
  if (repeats < 1) throw CliError{kExitUsage, "invalid repeats: must be >= 1"};
  std::mt19937_64 rng(o.seed);

  std::vector<std::pair<textdet::BezierPair, textdet::BezierPair>> cases;
  cases.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i)
    cases.emplace_back(random_band_pair(rng, 0.3), random_band_pair(rng, 0.3));

  const int dim = 300;
  std::uniform_real_distribution<double> cell(0.0, 1.0);
  std::vector<double> cells(static_cast<std::size_t>(dim) * dim);
  for (double& v : cells) v = cell(rng);
  const textdet::CostMatrix hungarian_input(dim, dim, std::move(cells));

  textdet::BoxLossConfig split_cfg;
  split_cfg.split_mode = textdet::SplitMode::SplitRect3;

  double checksum = 0.0;
  struct Row {
    const char* name;
    std::size_t items;
    double median_ms;
  };
  std::vector<Row> rows;
  auto run_kernel = [&](const char* name, std::size_t items, auto&& body) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      body();
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    rows.push_back({name, items, times[times.size() / 2]});
  };

  run_kernel("split_giou_loss", cases.size(), [&] {
    for (const auto& [pred, gt] : cases)
      checksum += textdet::box_loss(pred, gt, split_cfg).total;
  });
  run_kernel("hungarian_300x300", 1, [&] {
    checksum += textdet::hungarian(hungarian_input).total_cost;
  });
  run_kernel("polygon_sampling", cases.size(), [&] {
    for (const auto& [pred, gt] : cases)
      checksum += textdet::sample_polygon(pred, o.n_v).vertices().front().x;
  });

  if (o.json_out) {
    json jrows = json::array();
    for (const Row& r : rows) {
      const double per_sec =
          r.median_ms > 0.0 ? 1000.0 * static_cast<double>(r.items) /
                                  r.median_ms
                            : 0.0;
      jrows.push_back({{"kernel", r.name},
                       {"items", r.items},
                       {"median_ms", r.median_ms},
                       {"per_second", per_sec}});
    }
    json out{{"kernels", std::move(jrows)}, {"checksum", checksum}};
    std::printf("%s\n", out.dump().c_str());
  } else {
    std::printf("%-20s %10s %12s %14s\n", "kernel", "items", "median_ms",
                "per_second");
    for (const Row& r : rows) {
      const double per_sec =
          r.median_ms > 0.0 ? 1000.0 * static_cast<double>(r.items) /
                                  r.median_ms
                            : 0.0;
      std::printf("%-20s %10zu %12.3f %14.1f\n", r.name, r.items, r.median_ms,
                  per_sec);
    }
    std::printf("checksum %.6f\n", checksum);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometry, loss, matching, and evaluation toolkit for "
               "arbitrary-shape text detection"};
  app.require_subcommand(1);

  Options o;
  auto* opt_config =
      app.add_option("--config", o.config_path, "JSON config file");
  app.add_flag("--json", o.json_out, "emit machine-readable JSON");
  auto* opt_nv =
      app.add_option("--n-v", o.n_v, "boundary samples per curve side");
  auto* opt_iou = app.add_option("--iou-threshold", o.iou_threshold,
                                 "match threshold in (0, 1)");
  auto* opt_mode = app.add_option("--split-mode", o.split_mode,
                                  "GIoU mode: full, rect3, or rrect3");
  auto* opt_l1 =
      app.add_option("--lambda1", o.lambda1, "regression term weight");
  auto* opt_l2 = app.add_option("--lambda2", o.lambda2, "GIoU term weight");
  auto* opt_cw = app.add_option("--class-weight", o.class_weight,
                                "classification term weight in matching");
  auto* opt_seed = app.add_option("--seed", o.seed, "RNG seed");
  auto* opt_out = app.add_option("--output", o.output_path, "output file path");

  ConvertArgs conv;
  CLI::App* sub_convert =
      app.add_subcommand("convert", "parse annotations and rewrite "
                                    "representations as canonical JSON");
  sub_convert->fallthrough();
  sub_convert->add_option("input", conv.input, "input file")->required();
  sub_convert->add_option("output", conv.output, "output JSON file");
  sub_convert->add_option("--from", conv.from,
                          "input format: icdar15, poly, or json");
  sub_convert->add_option("--to", conv.to,
                          "target representation: none, bezier16, or polygon");
  sub_convert->add_option("--image-id", conv.image_id,
                          "image id for text inputs (default: file stem)");
  sub_convert->add_option("--in-vertices", conv.in_vertices,
                          "vertex count per line for --from poly");
  sub_convert->add_option("--width", conv.width, "image width for text inputs");
  sub_convert->add_option("--height", conv.height,
                          "image height for text inputs");

  std::string loss_pred, loss_gt;
  CLI::App* sub_loss = app.add_subcommand(
      "loss", "per-instance regression + GIoU losses for aligned sets");
  sub_loss->fallthrough();
  sub_loss->add_option("pred", loss_pred, "predictions JSON")->required();
  sub_loss->add_option("gt", loss_gt, "ground truth JSON")->required();

  std::string eval_det, eval_gt;
  CLI::App* sub_eval = app.add_subcommand(
      "evaluate", "precision/recall/h-mean detection scoring");
  sub_eval->fallthrough();
  sub_eval->add_option("det", eval_det, "detections JSON")->required();
  sub_eval->add_option("gt", eval_gt, "ground truth JSON")->required();

  MatchArgs match_args;
  CLI::App* sub_match = app.add_subcommand(
      "match", "optimal one-to-one assignment of predictions to targets");
  sub_match->fallthrough();
  sub_match->add_option("--matrix", match_args.matrix_path,
                        "JSON cost matrix (2D array)");
  sub_match->add_option("--pred", match_args.pred_path, "predictions JSON");
  sub_match->add_option("--gt", match_args.gt_path, "ground truth JSON");

  int gc_trials = 100;
  bool gc_corrupt = false;
  CLI::App* sub_gradcheck = app.add_subcommand(
      "gradcheck", "verify analytic gradients against finite differences");
  sub_gradcheck->fallthrough();
  sub_gradcheck->add_option("--trials", gc_trials, "random trials to run");
  sub_gradcheck->add_flag("--corrupt-gradient", gc_corrupt)->group("");

  int bench_size = 10000;
  int bench_repeats = 5;
  CLI::App* sub_bench =
      app.add_subcommand("bench", "median wall time of the hot kernels");
  sub_bench->fallthrough();
  sub_bench->add_option("--size", bench_size, "work items per kernel");
  sub_bench->add_option("--repeats", bench_repeats, "timing repetitions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  std::unordered_map<std::string, bool> on_cli{
      {"lambda1", opt_l1->count() > 0},
      {"lambda2", opt_l2->count() > 0},
      {"class_weight", opt_cw->count() > 0},
      {"iou_threshold", opt_iou->count() > 0},
      {"n_v", opt_nv->count() > 0},
      {"split_mode", opt_mode->count() > 0},
      {"seed", opt_seed->count() > 0},
      {"output_path", opt_out->count() > 0},
  };
  (void)opt_config;

  try {
    apply_config_file(o, on_cli);
    validate_options(o);
    if (*sub_convert) return cmd_convert(o, conv);
    if (*sub_loss) return cmd_loss(o, loss_pred, loss_gt);
    if (*sub_eval) return cmd_evaluate(o, eval_det, eval_gt);
    if (*sub_match) return cmd_match(o, match_args);
    if (*sub_gradcheck) return cmd_gradcheck(o, gc_trials, gc_corrupt);
    if (*sub_bench) return cmd_bench(o, bench_size, bench_repeats);
    std::fprintf(stderr, "error: no subcommand given\n");
    return kExitUsage;
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
