/*
 * Copyright 2026 The semantic_vtr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vtr/semantic_map.hpp"

#include <fstream>
#include <utility>

#include <json.hpp>

#include "vtr/errors.hpp"

namespace vtr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const json* find_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path.empty() ? key : path + "." + key,
                                         "missing field");
  return &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

Vec3 as_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) {
    throw SchemaError(path, "expected an array of 3 numbers");
  }
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
          as_number(v[2], path + "[2]")};
}

}  // namespace

std::optional<Vec3> estimate_object_position(const Detection& det,
                                             std::span<const FeaturePoint> features,
                                             double pixel_radius,
                                             int min_features) {
  const double anchor_u = 0.5 * (det.u_min + det.u_max);
  const double anchor_v = det.v_min;
  const double radius_sq = pixel_radius * pixel_radius;

  Vec3 sum;
  int count = 0;
  for (const FeaturePoint& f : features) {
    const double du = f.pixel.x - anchor_u;
    const double dv = f.pixel.y - anchor_v;
    if (du * du + dv * dv <= radius_sq) {
      sum = sum + f.position;
      ++count;
    }
  }
  if (count < min_features) return std::nullopt;
  return (1.0 / count) * sum;
}

bool reject_partial(const Detection& det, int image_w, int image_h,
                    double border_margin) {
  return det.u_min < border_margin || det.v_min < border_margin ||
         image_w - det.u_max < border_margin ||
         image_h - det.v_max < border_margin;
}

InsertOutcome insert_landmark(SemanticMap& map, const std::string& label,
                              const Vec3& position, double dedup_threshold) {
  int same_label = 0;
  for (const Landmark& lm : map.landmarks) {
    if (lm.label != label) continue;
    if (distance(lm.position, position) < dedup_threshold) {
      return InsertOutcome::merged;
    }
    ++same_label;
  }
  map.landmarks.push_back({label, same_label, position, same_label == 0});
  if (same_label > 0) {
    for (Landmark& lm : map.landmarks) {
      if (lm.label == label) lm.unique = false;
    }
  }
  return InsertOutcome::inserted;
}

std::vector<Landmark> unique_landmarks(const SemanticMap& map) {
  std::vector<Landmark> out;
  for (const Landmark& lm : map.landmarks) {
    if (lm.unique) out.push_back(lm);
  }
  return out;
}

KeyframeOutcome record_keyframe(SemanticMap& map, const Pose& pose,
                                double min_spacing) {
  if (pose.frame_id != map.map_id) {
    throw FrameMismatch("keyframe frame '" + pose.frame_id +
                        "' does not match map '" + map.map_id + "'");
  }
  if (!map.keyframes.empty() &&
      distance(map.keyframes.back().position(), pose.position()) < min_spacing) {
    return KeyframeOutcome::skipped;
  }
  map.keyframes.push_back(pose);
  return KeyframeOutcome::appended;
}

void save_map(const SemanticMap& map, const std::filesystem::path& path) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["map_id"] = map.map_id;
  doc["meta"] = map.meta;
  doc["landmarks"] = ordered_json::array();
  for (const Landmark& lm : map.landmarks) {
    doc["landmarks"].push_back({{"label", lm.label},
                                {"instance", lm.instance},
                                {"pos", {lm.position.x, lm.position.y, lm.position.z}},
                                {"unique", lm.unique}});
  }
  doc["keyframes"] = ordered_json::array();
  for (const Pose& kf : map.keyframes) {
    doc["keyframes"].push_back(
        {{"x", kf.x}, {"y", kf.y}, {"z", kf.z}, {"heading", kf.heading}});
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SemanticMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("(document)", e.what());
  }

  SemanticMap map;
  map.map_id = as_string(*find_field(doc, "map_id", ""), "map_id");

  const json* meta = find_field(doc, "meta", "");
  if (!meta->is_object()) throw SchemaError("meta", "expected an object");
  for (const auto& [key, value] : meta->items()) {
    map.meta[key] = as_string(value, "meta." + key);
  }

  const json* landmarks = find_field(doc, "landmarks", "");
  if (!landmarks->is_array()) throw SchemaError("landmarks", "expected an array");
  for (size_t i = 0; i < landmarks->size(); ++i) {
    const json& row = (*landmarks)[i];
    const std::string p = "landmarks[" + std::to_string(i) + "]";
    Landmark lm;
    lm.label = as_string(*find_field(row, "label", p), p + ".label");
    const json* instance = find_field(row, "instance", p);
    if (!instance->is_number_integer()) {
      throw SchemaError(p + ".instance", "expected an integer");
    }
    lm.instance = instance->get<int>();
    lm.position = as_vec3(*find_field(row, "pos", p), p + ".pos");
    const json* unique = find_field(row, "unique", p);
    if (!unique->is_boolean()) throw SchemaError(p + ".unique", "expected a bool");
    lm.unique = unique->get<bool>();
    map.landmarks.push_back(std::move(lm));
  }

  const json* keyframes = find_field(doc, "keyframes", "");
  if (!keyframes->is_array()) throw SchemaError("keyframes", "expected an array");
  for (size_t i = 0; i < keyframes->size(); ++i) {
    const json& row = (*keyframes)[i];
    const std::string p = "keyframes[" + std::to_string(i) + "]";
    Pose kf;
    kf.x = as_number(*find_field(row, "x", p), p + ".x");
    kf.y = as_number(*find_field(row, "y", p), p + ".y");
    kf.z = as_number(*find_field(row, "z", p), p + ".z");
    kf.heading = as_number(*find_field(row, "heading", p), p + ".heading");
    kf.frame_id = map.map_id;
    map.keyframes.push_back(std::move(kf));
  }
  return map;
}

MapBuilder::MapBuilder(std::string map_id, const MapBuildConfig& config,
                       int image_w, int image_h)
    : config_(config), image_w_(image_w), image_h_(image_h) {
  map_.map_id = std::move(map_id);
}

void MapBuilder::ingest(std::span<const Detection> detections,
                        std::span<const FeaturePoint> features,
                        const Pose& odometry) {
  record_keyframe(map_, odometry, config_.keyframe_min_spacing);
  for (const Detection& det : detections) {
    if (reject_partial(det, image_w_, image_h_, config_.border_margin)) continue;
    const auto position = estimate_object_position(
        det, features, config_.pixel_radius, config_.min_features);
    if (!position) continue;
    insert_landmark(map_, det.label, *position, config_.dedup_threshold);
  }
}

size_t MapBuilder::unique_count() const {
  size_t n = 0;
  for (const Landmark& lm : map_.landmarks) {
    if (lm.unique) ++n;
  }
  return n;
}

}  // namespace vtr
