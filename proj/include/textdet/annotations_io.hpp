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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "textdet/bezier.hpp"
#include "textdet/geometry.hpp"

namespace textdet {

// Tagged shape representation of one annotated text instance.
//   Quad     4 corners, reading order (tl, tr, br, bl), 8 coords
//   Polygon  2k vertices, first half top left-to-right, second half
//            bottom right-to-left, 2n coords
//   Bezier16 cubic pair, top P0..P3 then bottom P0..P3, 16 coords
enum class Repr { Quad, Polygon, Bezier16 };

inline std::string_view repr_name(Repr r) {
  switch (r) {
    case Repr::Quad:
      return "quad";
    case Repr::Polygon:
      return "polygon";
    case Repr::Bezier16:
      return "bezier16";
  }
  throw std::invalid_argument("repr_name: unknown representation tag");
}

inline std::optional<Repr> repr_from_name(std::string_view name) {
  if (name == "quad") return Repr::Quad;
  if (name == "polygon") return Repr::Polygon;
  if (name == "bezier16") return Repr::Bezier16;
  return std::nullopt;
}

struct Instance {
  Repr repr = Repr::Quad;
  // Interleaved x,y coordinates in image pixels (reals, not snapped).
  std::vector<double> coords;
  bool ignore = false;
  std::optional<std::string> text;
  // Detection confidence; absent for ground truth.
  std::optional<double> score;
};

struct ImageAnnotations {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<Instance> instances;
};

struct AnnotationSet {
  std::vector<ImageAnnotations> images;
};

inline void validate(const Instance& inst) {
  const std::size_t n = inst.coords.size();
  switch (inst.repr) {
    case Repr::Quad:
      if (n != 8) {
        throw std::invalid_argument("quad instance needs 8 coords, got " +
                                    std::to_string(n));
      }
      break;
    case Repr::Bezier16:
      if (n != 16) {
        throw std::invalid_argument("bezier16 instance needs 16 coords, got " +
                                    std::to_string(n));
      }
      break;
    case Repr::Polygon:
      if (n < 6 || n % 2 != 0) {
        throw std::invalid_argument(
            "polygon instance needs an even coord count >= 6, got " +
            std::to_string(n));
      }
      break;
  }
  for (double v : inst.coords) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("instance coords must be finite");
    }
  }
  if (inst.score && !(std::isfinite(*inst.score))) {
    throw std::invalid_argument("instance score must be finite");
  }
}

inline void validate(const AnnotationSet& set) {
  std::vector<std::string_view> ids;
  ids.reserve(set.images.size());
  for (const ImageAnnotations& img : set.images) {
    if (img.id.empty()) {
      throw std::invalid_argument("image id must be non-empty");
    }
    if (img.width < 0 || img.height < 0) {
      throw std::invalid_argument("image '" + img.id +
                                  "' has negative dimensions");
    }
    ids.push_back(img.id);
    for (const Instance& inst : img.instances) validate(inst);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("duplicate image id '" +
                                std::string(*std::adjacent_find(
                                    ids.begin(), ids.end())) +
                                "'");
  }
}

inline std::vector<Point2> instance_points(const Instance& inst) {
  validate(inst);
  std::vector<Point2> pts;
  pts.reserve(inst.coords.size() / 2);
  for (std::size_t i = 0; i + 1 < inst.coords.size(); i += 2) {
    pts.push_back({inst.coords[i], inst.coords[i + 1]});
  }
  return pts;
}

// Boundary of a quad or polygon instance as a TextPolygon.
inline TextPolygon instance_polygon(const Instance& inst) {
  if (inst.repr == Repr::Bezier16) {
    throw std::invalid_argument(
        "instance_polygon: bezier16 instances must be sampled first");
  }
  return TextPolygon(instance_points(inst));
}

inline BezierPair instance_bezier_pair(const Instance& inst) {
  if (inst.repr != Repr::Bezier16) {
    throw std::invalid_argument(
        "instance_bezier_pair: instance is not bezier16");
  }
  validate(inst);
  std::array<double, 16> flat{};
  std::copy(inst.coords.begin(), inst.coords.end(), flat.begin());
  return pair_from_coordinates(flat);
}

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::string_view strip_spaces(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline bool parse_number(std::string_view token, double& out) {
  token = strip_spaces(token);
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Offset just past the n-th comma of `line`, or npos if there are
// fewer than n commas.
inline std::size_t after_nth_comma(std::string_view line, std::size_t n) {
  std::size_t start = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) return std::string_view::npos;
    start = comma + 1;
  }
  return start;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename Fn>
inline void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    ++line_no;
    line = strip_cr(line);
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF")
      line.remove_prefix(3);
    if (!strip_spaces(line).empty()) fn(line_no, line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

[[noreturn]] inline void line_error(std::size_t line_no,
                                    const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace detail

// Parses ICDAR15-style ground truth text: one instance per line, eight
// comma-separated corner coordinates in reading order followed by a
// transcription field. "###" marks a do-not-care region.
inline std::vector<Instance> parse_icdar15(std::string_view text) {
  std::vector<Instance> out;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const std::size_t text_at = detail::after_nth_comma(line, 8);
    if (text_at == std::string_view::npos) {
      detail::line_error(line_no, "expected 8 coordinates and a transcription");
    }
    const auto fields = detail::split_commas(line.substr(0, text_at - 1));
    Instance inst;
    inst.repr = Repr::Quad;
    inst.coords.resize(8);
    for (std::size_t k = 0; k < 8; ++k) {
      if (!detail::parse_number(fields[k], inst.coords[k])) {
        detail::line_error(line_no, "coordinate " + std::to_string(k + 1) +
                                        " is not a number: '" +
                                        std::string(fields[k]) + "'");
      }
    }
    const std::string transcription{detail::strip_spaces(line.substr(text_at))};
    if (transcription == "###") {
      inst.ignore = true;
    } else {
      inst.text = transcription;
    }
    out.push_back(std::move(inst));
  });
  return out;
}

// Parses polygon ground truth text: one instance per line, 2*n_vertices
// comma-separated coordinates optionally followed by a transcription.
inline std::vector<Instance> parse_polygon_lines(std::string_view text,
                                                 int n_vertices) {
  if (n_vertices < 3) {
    throw std::invalid_argument("parse_polygon_lines: n_vertices must be >= 3");
  }
  const std::size_t want = static_cast<std::size_t>(2 * n_vertices);
  std::vector<Instance> out;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = detail::split_commas(line);
    if (fields.size() < want) {
      detail::line_error(line_no, "expected " + std::to_string(want) +
                                      " coordinates for " +
                                      std::to_string(n_vertices) +
                                      " vertices, got " +
                                      std::to_string(fields.size()) +
                                      " fields");
    }
    Instance inst;
    inst.repr = n_vertices == 4 ? Repr::Quad : Repr::Polygon;
    inst.coords.resize(want);
    for (std::size_t k = 0; k < want; ++k) {
      if (!detail::parse_number(fields[k], inst.coords[k])) {
        detail::line_error(line_no, "coordinate " + std::to_string(k + 1) +
                                        " is not a number: '" +
                                        std::string(fields[k]) + "'");
      }
    }
    std::string transcription;
    if (fields.size() > want) {
      const std::size_t text_at = detail::after_nth_comma(line, want);
      transcription = detail::strip_spaces(line.substr(text_at));
    }
    if (transcription == "###") {
      inst.ignore = true;
    } else if (!transcription.empty()) {
      inst.text = transcription;
    }
    out.push_back(std::move(inst));
  });
  return out;
}

// Serializes to the canonical JSON document. Output bytes are a pure
// function of the set: object keys are alphabetical, images are ordered
// by id, and numbers use shortest round-trip formatting.
inline std::string to_canonical_json(const AnnotationSet& set) {
  validate(set);
  std::vector<const ImageAnnotations*> order;
  order.reserve(set.images.size());
  for (const ImageAnnotations& img : set.images) order.push_back(&img);
  std::sort(order.begin(), order.end(),
            [](const ImageAnnotations* a, const ImageAnnotations* b) {
              return a->id < b->id;
            });
  nlohmann::json images = nlohmann::json::array();
  for (const ImageAnnotations* img : order) {
    nlohmann::json instances = nlohmann::json::array();
    for (const Instance& inst : img->instances) {
      nlohmann::json j{{"repr", repr_name(inst.repr)},
                       {"coords", inst.coords},
                       {"ignore", inst.ignore}};
      j["text"] = inst.text ? nlohmann::json(*inst.text) : nlohmann::json();
      if (inst.score) j["score"] = *inst.score;
      instances.push_back(std::move(j));
    }
    images.push_back({{"id", img->id},
                      {"width", img->width},
                      {"height", img->height},
                      {"instances", std::move(instances)}});
  }
  return nlohmann::json{{"images", std::move(images)}}.dump();
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path,
                                      const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

inline const nlohmann::json& require_key(const nlohmann::json& obj,
                                         const std::string& path,
                                         const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    schema_error(path, std::string("missing key '") + key + "'");
  }
  return *it;
}

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) schema_error(path, "unknown key '" + it.key() + "'");
  }
}

inline int read_dimension(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  const auto n = v.get<long long>();
  if (n < 0) schema_error(path, "must be non-negative");
  if (n > 1000000000LL) schema_error(path, "implausibly large");
  return static_cast<int>(n);
}

inline Instance read_instance(const nlohmann::json& v,
                              const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object");
  reject_unknown_keys(v, path, {"repr", "coords", "ignore", "text", "score"});
  Instance inst;
  const nlohmann::json& jrepr = require_key(v, path, "repr");
  if (!jrepr.is_string()) schema_error(path + "/repr", "expected a string");
  const auto repr = repr_from_name(jrepr.get<std::string>());
  if (!repr) {
    schema_error(path + "/repr", "expected one of quad, polygon, bezier16");
  }
  inst.repr = *repr;
  const nlohmann::json& jcoords = require_key(v, path, "coords");
  if (!jcoords.is_array()) schema_error(path + "/coords", "expected an array");
  inst.coords.reserve(jcoords.size());
  for (std::size_t i = 0; i < jcoords.size(); ++i) {
    const nlohmann::json& c = jcoords[i];
    if (!c.is_number()) {
      schema_error(path + "/coords/" + std::to_string(i), "expected a number");
    }
    inst.coords.push_back(c.get<double>());
  }
  const nlohmann::json& jignore = require_key(v, path, "ignore");
  if (!jignore.is_boolean()) schema_error(path + "/ignore", "expected a bool");
  inst.ignore = jignore.get<bool>();
  const nlohmann::json& jtext = require_key(v, path, "text");
  if (jtext.is_string()) {
    inst.text = jtext.get<std::string>();
  } else if (!jtext.is_null()) {
    schema_error(path + "/text", "expected a string or null");
  }
  if (auto it = v.find("score"); it != v.end()) {
    if (!it->is_number()) schema_error(path + "/score", "expected a number");
    inst.score = it->get<double>();
  }
  try {
    validate(inst);
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }
  return inst;
}

}  // namespace detail

// Parses a canonical JSON document. Any structural or schema violation
// throws std::runtime_error naming the offending JSON path; no partial
// result is ever returned.
inline AnnotationSet parse_canonical_json(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) detail::schema_error("/", "expected an object");
  detail::reject_unknown_keys(root, "/", {"images"});
  const nlohmann::json& jimages = detail::require_key(root, "/", "images");
  if (!jimages.is_array()) detail::schema_error("/images", "expected an array");
  AnnotationSet set;
  set.images.reserve(jimages.size());
  for (std::size_t i = 0; i < jimages.size(); ++i) {
    const std::string ipath = "/images/" + std::to_string(i);
    const nlohmann::json& jimg = jimages[i];
    if (!jimg.is_object()) detail::schema_error(ipath, "expected an object");
    detail::reject_unknown_keys(jimg, ipath,
                                {"id", "width", "height", "instances"});
    ImageAnnotations img;
    const nlohmann::json& jid = detail::require_key(jimg, ipath, "id");
    if (!jid.is_string() || jid.get<std::string>().empty()) {
      detail::schema_error(ipath + "/id", "expected a non-empty string");
    }
    img.id = jid.get<std::string>();
    img.width = detail::read_dimension(
        detail::require_key(jimg, ipath, "width"), ipath + "/width");
    img.height = detail::read_dimension(
        detail::require_key(jimg, ipath, "height"), ipath + "/height");
    const nlohmann::json& jinst =
        detail::require_key(jimg, ipath, "instances");
    if (!jinst.is_array()) {
      detail::schema_error(ipath + "/instances", "expected an array");
    }
    img.instances.reserve(jinst.size());
    for (std::size_t k = 0; k < jinst.size(); ++k) {
      img.instances.push_back(detail::read_instance(
          jinst[k], ipath + "/instances/" + std::to_string(k)));
    }
    set.images.push_back(std::move(img));
  }
  try {
    validate(set);
  } catch (const std::invalid_argument& e) {
    detail::schema_error("/images", e.what());
  }
  return set;
}

struct ConversionTarget {
  Repr kind = Repr::Bezier16;
  // Total vertex count for Polygon targets (split evenly between sides).
  int n_vertices = 0;

  static ConversionTarget bezier16() { return {Repr::Bezier16, 0}; }
  static ConversionTarget polygon(int n_vertices) {
    if (n_vertices < 4 || n_vertices % 2 != 0) {
      throw std::invalid_argument(
          "polygon target needs an even vertex count >= 4, got " +
          std::to_string(n_vertices));
    }
    return {Repr::Polygon, n_vertices};
  }
};

struct ConversionFailure {
  std::string image_id;
  std::size_t instance_index = 0;
  std::string message;
};

struct ConversionReport {
  AnnotationSet set;
  std::vector<ConversionFailure> failures;
};

// Lifts any instance to a cubic pair: bezier16 directly, 4-vertex shapes
// through straight-edge controls, denser polygons through per-side fits.
inline BezierPair instance_to_bezier_pair(const Instance& inst) {
  if (inst.repr == Repr::Bezier16) return instance_bezier_pair(inst);
  const TextPolygon poly = instance_polygon(inst);
  if (poly.vertices().size() == 4) return quad_to_bezier_pair(poly);
  return polygon_to_bezier_pair(poly);
}

namespace detail {

inline std::vector<double> flatten(std::span<const Point2> pts) {
  std::vector<double> out;
  out.reserve(pts.size() * 2);
  for (const Point2& p : pts) {
    out.push_back(p.x);
    out.push_back(p.y);
  }
  return out;
}

}  // namespace detail

// Rewrites every instance into the target representation. Image ids,
// instance order, ignore flags, transcriptions, and scores pass through
// untouched; instances that already match the target are copied verbatim.
// An instance whose geometry cannot be converted is dropped from the
// output and recorded in the failure report.
inline ConversionReport convert_representation(const AnnotationSet& set,
                                               const ConversionTarget& target) {
  validate(set);
  if (target.kind == Repr::Quad) {
    throw std::invalid_argument("conversion target must be bezier16 or polygon");
  }
  if (target.kind == Repr::Polygon &&
      (target.n_vertices < 4 || target.n_vertices % 2 != 0)) {
    throw std::invalid_argument(
        "polygon target needs an even vertex count >= 4");
  }
  ConversionReport report;
  report.set.images.reserve(set.images.size());
  for (const ImageAnnotations& img : set.images) {
    ImageAnnotations out_img;
    out_img.id = img.id;
    out_img.width = img.width;
    out_img.height = img.height;
    out_img.instances.reserve(img.instances.size());
    for (std::size_t k = 0; k < img.instances.size(); ++k) {
      const Instance& inst = img.instances[k];
      const bool already_matches =
          (target.kind == Repr::Bezier16 && inst.repr == Repr::Bezier16) ||
          (target.kind == Repr::Polygon && inst.repr == Repr::Polygon &&
           inst.coords.size() ==
               static_cast<std::size_t>(2 * target.n_vertices));
      if (already_matches) {
        out_img.instances.push_back(inst);
        continue;
      }
      try {
        Instance converted = inst;
        const BezierPair pair = instance_to_bezier_pair(inst);
        if (target.kind == Repr::Bezier16) {
          converted.repr = Repr::Bezier16;
          const std::array<double, 16> flat = pair_coordinates(pair);
          converted.coords.assign(flat.begin(), flat.end());
        } else {
          converted.repr = Repr::Polygon;
          const TextPolygon poly =
              sample_polygon(pair, target.n_vertices / 2);
          converted.coords = detail::flatten(poly.vertices());
        }
        out_img.instances.push_back(std::move(converted));
      } catch (const std::exception& e) {
        report.failures.push_back({img.id, k, e.what()});
      }
    }
    report.set.images.push_back(std::move(out_img));
  }
  return report;
}

}  // namespace textdet
