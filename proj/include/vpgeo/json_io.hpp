#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpgeo/cuboid.hpp"
#include "vpgeo/errors.hpp"
#include "vpgeo/fusion.hpp"
#include "vpgeo/metrics.hpp"
#include "vpgeo/refine.hpp"
#include "vpgeo/synth.hpp"

namespace vpgeo {

using Json = nlohmann::json;

/// Cuboid plus the 2D anchor box that defines its RoI normalization.
struct CuboidRecord {
  Cuboid2D cuboid;
  Box2D bbox;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failed: " + path);
  }
  return buf.str();
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

/// Parse with the library's error mapped to ValidationError so malformed
/// input is an input problem, not an I/O one.
inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

inline Json load_json_file(const std::string& path) {
  return parse_json(read_text_file(path));
}

/// Canonical serialization: keys sorted (the object type is an ordered map),
/// two-space indent, shortest round-trip numbers, trailing newline.
inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline double require_number(const Json& j, const std::string& context) {
  if (!j.is_number()) {
    throw ValidationError(context + " must be a number");
  }
  return j.get<double>();
}

inline const Json& require_key(const Json& j, const std::string& key,
                               const std::string& context) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(context + " is missing key \"" + key + "\"");
  }
  return j.at(key);
}

inline std::vector<double> require_number_array(const Json& j,
                                                std::size_t expected,
                                                const std::string& context) {
  if (!j.is_array() || j.size() != expected) {
    throw ValidationError(context + " must be an array of " +
                          std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    out.push_back(require_number(v, context + " entry"));
  }
  return out;
}

inline std::string frame_name(Frame f) {
  return f == Frame::Image ? "image" : "roi_relative";
}

inline Frame frame_from_name(const std::string& name) {
  if (name == "image") return Frame::Image;
  if (name == "roi_relative") return Frame::RoiRelative;
  throw ValidationError("unknown frame \"" + name + "\"");
}

}  // namespace detail

inline Json cuboid_record_to_json(const CuboidRecord& rec) {
  Json vertices = Json::array();
  for (const Point2& v : rec.cuboid.vertices) {
    vertices.push_back(Json::array({v.x, v.y}));
  }
  Json j;
  j["frame"] = detail::frame_name(rec.cuboid.frame);
  j["vertices"] = vertices;
  j["bbox2d"] = Json::array({rec.bbox.x, rec.bbox.y, rec.bbox.w, rec.bbox.h});
  return j;
}

inline CuboidRecord cuboid_record_from_json(const Json& j) {
  CuboidRecord rec;
  const Json& frame = detail::require_key(j, "frame", "cuboid record");
  if (!frame.is_string()) {
    throw ValidationError("cuboid frame must be a string");
  }
  rec.cuboid.frame = detail::frame_from_name(frame.get<std::string>());

  const Json& verts = detail::require_key(j, "vertices", "cuboid record");
  if (!verts.is_array() || verts.size() != 8) {
    throw ValidationError("cuboid needs exactly 8 vertices");
  }
  for (std::size_t i = 0; i < 8; ++i) {
    const auto xy = detail::require_number_array(verts.at(i), 2, "vertex");
    rec.cuboid.vertices[i] = Point2{xy[0], xy[1]};
  }

  const auto box = detail::require_number_array(
      detail::require_key(j, "bbox2d", "cuboid record"), 4, "bbox2d");
  rec.bbox = Box2D{box[0], box[1], box[2], box[3]};
  if (!(rec.bbox.w > 0.0) || !(rec.bbox.h > 0.0)) {
    throw ValidationError("bbox2d width and height must be positive");
  }
  return rec;
}

inline Json scene_to_json(const Scene& scene) {
  Json j = cuboid_record_to_json(CuboidRecord{scene.cuboid, scene.bbox});
  Json camera;
  camera["focal"] = scene.camera.focal;
  camera["principal"] =
      Json::array({scene.camera.principal.x, scene.camera.principal.y});
  camera["rotation"] = scene.camera.rotation;
  camera["translation"] = scene.camera.translation;
  j["camera"] = camera;

  Json box3d;
  box3d["center"] = scene.box3d.center;
  box3d["dims"] = scene.box3d.dims;
  box3d["yaw"] = scene.box3d.yaw;
  j["box3d"] = box3d;

  j["seed"] = scene.seed;
  return j;
}

inline Scene scene_from_json(const Json& j) {
  Scene scene;
  const CuboidRecord rec = cuboid_record_from_json(j);
  if (rec.cuboid.frame != Frame::Image) {
    throw ValidationError("scene cuboids must be in the image frame");
  }
  scene.cuboid = rec.cuboid;
  scene.bbox = rec.bbox;

  const Json& camera = detail::require_key(j, "camera", "scene");
  scene.camera.focal =
      detail::require_number(detail::require_key(camera, "focal", "camera"),
                             "camera focal");
  if (!(scene.camera.focal > 0.0)) {
    throw ValidationError("camera focal must be positive");
  }
  const auto principal = detail::require_number_array(
      detail::require_key(camera, "principal", "camera"), 2, "principal");
  scene.camera.principal = Point2{principal[0], principal[1]};
  const auto rotation = detail::require_number_array(
      detail::require_key(camera, "rotation", "camera"), 9, "rotation");
  for (std::size_t i = 0; i < 9; ++i) scene.camera.rotation[i] = rotation[i];
  const auto translation = detail::require_number_array(
      detail::require_key(camera, "translation", "camera"), 3, "translation");
  for (std::size_t i = 0; i < 3; ++i) {
    scene.camera.translation[i] = translation[i];
  }

  const Json& box3d = detail::require_key(j, "box3d", "scene");
  const auto center = detail::require_number_array(
      detail::require_key(box3d, "center", "box3d"), 3, "center");
  const auto dims = detail::require_number_array(
      detail::require_key(box3d, "dims", "box3d"), 3, "dims");
  for (std::size_t i = 0; i < 3; ++i) {
    scene.box3d.center[i] = center[i];
    scene.box3d.dims[i] = dims[i];
  }
  if (!(scene.box3d.dims[0] > 0.0) || !(scene.box3d.dims[1] > 0.0) ||
      !(scene.box3d.dims[2] > 0.0)) {
    throw ValidationError("box3d dims must be strictly positive");
  }
  scene.box3d.yaw = detail::require_number(
      detail::require_key(box3d, "yaw", "box3d"), "yaw");

  const Json& seed = detail::require_key(j, "seed", "scene");
  if (!seed.is_number_unsigned()) {
    throw ValidationError("scene seed must be an unsigned integer");
  }
  scene.seed = seed.get<std::uint64_t>();
  return scene;
}

inline Json scenes_file_to_json(std::uint64_t seed,
                                const std::vector<Scene>& scenes) {
  Json j;
  j["count"] = scenes.size();
  j["seed"] = seed;
  Json arr = Json::array();
  for (const Scene& s : scenes) arr.push_back(scene_to_json(s));
  j["scenes"] = arr;
  return j;
}

inline std::vector<Scene> scenes_from_json(const Json& j,
                                           std::uint64_t* seed_out = nullptr) {
  const Json& arr = detail::require_key(j, "scenes", "scenes file");
  if (!arr.is_array()) {
    throw ValidationError("\"scenes\" must be an array");
  }
  const Json& count = detail::require_key(j, "count", "scenes file");
  if (!count.is_number_unsigned() || count.get<std::size_t>() != arr.size()) {
    throw ValidationError("\"count\" does not match the scenes array");
  }
  if (seed_out != nullptr) {
    const Json& seed = detail::require_key(j, "seed", "scenes file");
    if (!seed.is_number_unsigned()) {
      throw ValidationError("scenes file seed must be an unsigned integer");
    }
    *seed_out = seed.get<std::uint64_t>();
  }
  std::vector<Scene> scenes;
  scenes.reserve(arr.size());
  for (const auto& s : arr) scenes.push_back(scene_from_json(s));
  return scenes;
}

inline Json arm_outcome_to_json(const ArmOutcome& arm) {
  Json j;
  j["pck"] = arm.pck;
  j["cq"] = arm.cq;
  j["vertex_error"] = arm.vertex_error;
  j["aborted"] = arm.aborted;
  return j;
}

inline Json arm_aggregate_to_json(const ArmAggregate& agg) {
  Json j;
  j["mean_pck"] = agg.mean_pck;
  j["mean_cq"] = agg.mean_cq;
  j["mean_vertex_error"] = agg.mean_vertex_error;
  return j;
}

inline Json study_report_to_json(const StudyReport& report) {
  Json config;
  config["steps"] = report.config.steps;
  config["learning_rate"] = report.config.learning_rate;
  config["lambda_vp"] = report.config.lambda_vp;
  config["sigma"] = report.config.sigma;

  Json rows = Json::array();
  for (const StudyRow& row : report.rows) {
    Json r;
    r["scene_seed"] = row.scene_seed;
    r["vp"] = arm_outcome_to_json(row.vp);
    r["baseline"] = arm_outcome_to_json(row.baseline);
    rows.push_back(r);
  }

  Json j;
  j["config"] = config;
  j["seed"] = report.seed;
  j["aggregate_vp"] = arm_aggregate_to_json(report.vp);
  j["aggregate_baseline"] = arm_aggregate_to_json(report.baseline);
  j["rows"] = rows;
  return j;
}

inline Json pr_curve_to_json(const PrCurve& curve) {
  Json points = Json::array();
  for (const PrPoint& p : curve.points) {
    Json pt;
    pt["precision"] = p.precision;
    pt["recall"] = p.recall;
    pt["threshold"] = p.threshold;
    points.push_back(pt);
  }
  Json j;
  j["ap"] = curve.ap;
  j["points"] = points;
  return j;
}

inline FeatureVector feature_vector_from_json(const Json& j) {
  if (!j.is_array()) {
    throw ValidationError("feature vector must be a JSON array of numbers");
  }
  FeatureVector out;
  out.reserve(j.size());
  for (const auto& v : j) {
    out.push_back(detail::require_number(v, "feature vector entry"));
  }
  return out;
}

inline std::vector<ScoredPair> scored_pairs_from_json(const Json& j) {
  if (!j.is_array()) {
    throw ValidationError("pairs file must be a JSON array");
  }
  std::vector<ScoredPair> pairs;
  pairs.reserve(j.size());
  for (const auto& entry : j) {
    ScoredPair p;
    p.score = detail::require_number(
        detail::require_key(entry, "score", "pair"), "pair score");
    const Json& flag = detail::require_key(entry, "same_category", "pair");
    if (!flag.is_boolean()) {
      throw ValidationError("pair same_category must be a boolean");
    }
    p.same_category = flag.get<bool>();
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace vpgeo
