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

#include "vtr/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <utility>

#include <json.hpp>

#include "vtr/errors.hpp"

namespace vtr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct CameraView {
  double forward = 0.0;  // along the heading
  double right = 0.0;
  double up = 0.0;       // relative to the camera height
};

CameraView to_camera(const Pose& pose, const CameraSpec& camera, const Vec3& p) {
  const double dx = p.x - pose.x;
  const double dy = p.y - pose.y;
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {c * dx + s * dy, s * dx - c * dy, p.z - pose.z - camera.height};
}

Vec2 project(const CameraSpec& camera, const CameraView& v) {
  return {0.5 * camera.image_w + camera.focal * v.right / v.forward,
          0.5 * camera.image_h - camera.focal * v.up / v.forward};
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

}  // namespace

SimRun::SimRun(const WorldSpec& world, const Pose& start, std::uint64_t run_seed,
               std::string map_id)
    : world_(world), map_id_(std::move(map_id)), start_(start),
      ground_truth_(start) {
  std::seed_seq seq{world.seed, run_seed};
  rng_.seed(seq);
  if (world_.noise.scale_min == world_.noise.scale_max) {
    scale_ = world_.noise.scale_min;
  } else {
    std::uniform_real_distribution<double> u(std::log(world_.noise.scale_min),
                                             std::log(world_.noise.scale_max));
    scale_ = std::exp(u(rng_));
  }
}

SimRun spawn_run(const WorldSpec& world, const Pose& start,
                 std::uint64_t run_seed, std::string map_id) {
  return SimRun(world, start, run_seed, std::move(map_id));
}

Vec3 SimRun::map_from_world(const Vec3& p) const {
  const double dx = p.x - start_.x;
  const double dy = p.y - start_.y;
  const double c = std::cos(start_.heading);
  const double s = std::sin(start_.heading);
  return {scale_ * (c * dx + s * dy), scale_ * (-s * dx + c * dy),
          scale_ * (p.z - start_.z)};
}

Pose SimRun::map_from_world(const Pose& p) const {
  const Vec3 q = map_from_world(p.position());
  return {q.x, q.y, q.z, wrap_angle(p.heading - start_.heading), map_id_};
}

Vec3 SimRun::world_from_map(const Vec3& p) const {
  const double c = std::cos(start_.heading);
  const double s = std::sin(start_.heading);
  const double x = p.x / scale_;
  const double y = p.y / scale_;
  return {start_.x + c * x - s * y, start_.y + s * x + c * y,
          start_.z + p.z / scale_};
}

Pose SimRun::world_from_map(const Pose& p) const {
  const Vec3 q = world_from_map(p.position());
  return {q.x, q.y, q.z, wrap_angle(p.heading + start_.heading), "world"};
}

Pose SimRun::odometry() const {
  Pose odom = map_from_world(ground_truth_);
  odom.x += odom_drift_.x;
  odom.y += odom_drift_.y;
  return odom;
}

Pose SimRun::robot_step(const ControlCommand& cmd, double dt) {
  ground_truth_.x += cmd.linear_velocity * std::cos(ground_truth_.heading) * dt;
  ground_truth_.y += cmd.linear_velocity * std::sin(ground_truth_.heading) * dt;
  ground_truth_.heading =
      wrap_angle(ground_truth_.heading + cmd.angular_velocity * dt);
  if (world_.noise.odom_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, world_.noise.odom_sigma);
    odom_drift_.x += n(rng_);
    odom_drift_.y += n(rng_);
  }
  time_ += dt;
  return ground_truth_;
}

Observation SimRun::observe(const Pose& ground_truth_pose) {
  Observation obs;
  const CameraSpec& cam = world_.camera;
  const int frame = frame_counter_++;
  for (const ObjectSpec& object : world_.objects) {
    const double dx = object.position.x - ground_truth_pose.x;
    const double dy = object.position.y - ground_truth_pose.y;
    const double dist = std::hypot(dx, dy);
    const double bearing =
        wrap_angle(std::atan2(dy, dx) - ground_truth_pose.heading);
    if (dist > cam.max_range || std::abs(bearing) > 0.5 * cam.horizontal_fov ||
        dist < 1e-6) {
      continue;
    }

    const CameraView anchor = to_camera(ground_truth_pose, cam, object.position);
    const Vec2 anchor_px = project(cam, anchor);
    const double radius_px = cam.focal * object.radius / anchor.forward;
    // The anchor is the top-center of the object; the box extends downward.
    Detection det;
    det.label = object.label;
    det.u_min = std::max(0.0, anchor_px.x - radius_px);
    det.u_max = std::min<double>(cam.image_w, anchor_px.x + radius_px);
    det.v_min = std::max(0.0, anchor_px.y);
    det.v_max = std::min<double>(cam.image_h, anchor_px.y + 2.0 * radius_px);
    det.frame = frame;
    if (det.u_min >= det.u_max || det.v_min >= det.v_max) continue;
    obs.detections.push_back(std::move(det));

    for (int k = 0; k < world_.features_per_object; ++k) {
      Vec3 sample = object.position;
      if (world_.noise.feature_sigma > 0.0) {
        std::normal_distribution<double> n(0.0, world_.noise.feature_sigma);
        sample.x += n(rng_);
        sample.y += n(rng_);
        sample.z += n(rng_);
      }
      const CameraView view = to_camera(ground_truth_pose, cam, sample);
      if (view.forward <= 1e-6) continue;
      obs.features.push_back({project(cam, view), map_from_world(sample)});
    }
  }
  return obs;
}

WorldSpec perturb_objects(const WorldSpec& world,
                          std::span<const std::pair<std::string, Vec3>> moves) {
  WorldSpec out = world;
  for (const auto& [label, position] : moves) {
    auto it = std::find_if(out.objects.begin(), out.objects.end(),
                           [&](const ObjectSpec& o) { return o.label == label; });
    if (it == out.objects.end()) {
      throw UnknownLabel("no object labeled '" + label + "'");
    }
    it->position = position;
  }
  return out;
}

void bootstrap_motion(SimRun& run, std::span<const TimedCommand> script,
                      MapBuilder& builder, double dt, Trace& trace,
                      size_t min_unique_objects, const SemanticMap* reference) {
  std::set<std::string> usable_labels;
  if (reference != nullptr) {
    for (const Landmark& lm : reference->landmarks) {
      if (lm.unique) usable_labels.insert(lm.label);
    }
  }
  const auto mapped_count = [&]() -> size_t {
    if (reference == nullptr) return builder.unique_count();
    size_t n = 0;
    for (const Landmark& lm : builder.map().landmarks) {
      if (lm.unique && usable_labels.count(lm.label) > 0) ++n;
    }
    return n;
  };

  const auto ingest_frame = [&] {
    const Observation obs = run.observe();
    builder.ingest(obs.detections, obs.features, run.odometry());
    const Pose gt = run.ground_truth();
    trace.push_back({run.time(), gt.x, gt.y, gt.heading, "bootstrap", -1});
  };

  ingest_frame();
  for (const TimedCommand& cmd : script) {
    const int steps = std::max(1, static_cast<int>(std::lround(cmd.duration / dt)));
    for (int i = 0; i < steps; ++i) {
      run.robot_step(cmd.command, dt);
      ingest_frame();
    }
    if (mapped_count() >= min_unique_objects) return;
  }
  if (mapped_count() < min_unique_objects) {
    throw BootstrapFailed("bootstrap mapped " + std::to_string(mapped_count()) +
                          " usable unique objects, need " +
                          std::to_string(min_unique_objects));
  }
}

WorldSpec load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("(document)", e.what());
  }
  if (!doc.is_object()) throw SchemaError("(document)", "expected an object");

  WorldSpec world;
  auto objects = doc.find("objects");
  if (objects == doc.end() || !objects->is_array()) {
    throw SchemaError("objects", "expected an array");
  }
  for (size_t i = 0; i < objects->size(); ++i) {
    const json& row = (*objects)[i];
    const std::string p = "objects[" + std::to_string(i) + "]";
    if (!row.is_object() || !row.contains("label") || !row["label"].is_string()) {
      throw SchemaError(p + ".label", "expected a string");
    }
    ObjectSpec object;
    object.label = row["label"].get<std::string>();
    if (!row.contains("pos") || !row["pos"].is_array() || row["pos"].size() != 3) {
      throw SchemaError(p + ".pos", "expected an array of 3 numbers");
    }
    object.position = {as_number(row["pos"][0], p + ".pos[0]"),
                       as_number(row["pos"][1], p + ".pos[1]"),
                       as_number(row["pos"][2], p + ".pos[2]")};
    if (row.contains("radius")) object.radius = as_number(row["radius"], p + ".radius");
    if (object.radius <= 0.0) throw SchemaError(p + ".radius", "must be positive");
    world.objects.push_back(std::move(object));
  }

  auto teach_path = doc.find("teach_path");
  if (teach_path == doc.end() || !teach_path->is_array()) {
    throw SchemaError("teach_path", "expected an array");
  }
  for (size_t i = 0; i < teach_path->size(); ++i) {
    const json& row = (*teach_path)[i];
    const std::string p = "teach_path[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != 2) {
      throw SchemaError(p, "expected an [x, y] pair");
    }
    world.teach_path.push_back({as_number(row[0], p + "[0]"),
                                as_number(row[1], p + "[1]")});
  }
  if (world.teach_path.size() < 2) {
    throw SchemaError("teach_path", "needs at least 2 waypoints");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw SchemaError("seed", "expected an integer");
    world.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("features_per_object")) {
    world.features_per_object = static_cast<int>(
        as_number(doc["features_per_object"], "features_per_object"));
  }

  if (doc.contains("noise")) {
    const json& n = doc["noise"];
    if (!n.is_object()) throw SchemaError("noise", "expected an object");
    if (n.contains("feature_sigma")) {
      world.noise.feature_sigma = as_number(n["feature_sigma"], "noise.feature_sigma");
    }
    if (n.contains("odom_sigma")) {
      world.noise.odom_sigma = as_number(n["odom_sigma"], "noise.odom_sigma");
    }
    if (n.contains("slam_scale_range")) {
      const json& r = n["slam_scale_range"];
      if (!r.is_array() || r.size() != 2) {
        throw SchemaError("noise.slam_scale_range", "expected [min, max]");
      }
      world.noise.scale_min = as_number(r[0], "noise.slam_scale_range[0]");
      world.noise.scale_max = as_number(r[1], "noise.slam_scale_range[1]");
    }
    if (world.noise.scale_min <= 0.0 ||
        world.noise.scale_min > world.noise.scale_max) {
      throw SchemaError("noise.slam_scale_range", "requires 0 < min <= max");
    }
  }

  if (doc.contains("camera")) {
    const json& c = doc["camera"];
    if (!c.is_object()) throw SchemaError("camera", "expected an object");
    if (c.contains("horizontal_fov")) {
      world.camera.horizontal_fov = as_number(c["horizontal_fov"], "camera.horizontal_fov");
    }
    if (c.contains("max_range")) {
      world.camera.max_range = as_number(c["max_range"], "camera.max_range");
    }
    if (c.contains("image_w")) {
      world.camera.image_w = static_cast<int>(as_number(c["image_w"], "camera.image_w"));
    }
    if (c.contains("image_h")) {
      world.camera.image_h = static_cast<int>(as_number(c["image_h"], "camera.image_h"));
    }
    if (c.contains("focal")) world.camera.focal = as_number(c["focal"], "camera.focal");
    if (c.contains("height")) world.camera.height = as_number(c["height"], "camera.height");
  }
  return world;
}

void save_world(const WorldSpec& world, const std::filesystem::path& path) {
  ordered_json doc;
  doc["objects"] = ordered_json::array();
  for (const ObjectSpec& o : world.objects) {
    doc["objects"].push_back({{"label", o.label},
                              {"pos", {o.position.x, o.position.y, o.position.z}},
                              {"radius", o.radius}});
  }
  doc["teach_path"] = ordered_json::array();
  for (const auto& wp : world.teach_path) doc["teach_path"].push_back({wp[0], wp[1]});
  doc["seed"] = world.seed;
  doc["features_per_object"] = world.features_per_object;
  doc["noise"] = {{"feature_sigma", world.noise.feature_sigma},
                  {"slam_scale_range", {world.noise.scale_min, world.noise.scale_max}},
                  {"odom_sigma", world.noise.odom_sigma}};
  doc["camera"] = {{"horizontal_fov", world.camera.horizontal_fov},
                   {"max_range", world.camera.max_range},
                   {"image_w", world.camera.image_w},
                   {"image_h", world.camera.image_h},
                   {"focal", world.camera.focal},
                   {"height", world.camera.height}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace vtr
