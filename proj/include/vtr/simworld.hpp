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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vtr/control.hpp"
#include "vtr/geometry.hpp"
#include "vtr/semantic_map.hpp"

namespace vtr {

/// Ground-truth environmental object. `position` is the anchor the mapping
/// pipeline estimates (the top-center of the object, where image features
/// concentrate); the object's bounding sphere hangs below it.
struct ObjectSpec {
  std::string label;
  Vec3 position;
  double radius = 0.25;
};

/// Stochastic model of the simulated front-end.
struct NoiseSpec {
  double feature_sigma = 0.02;   // map-units, per-axis Gaussian on feature 3D
  double scale_min = 0.5;        // per-run SLAM scale, log-uniform range
  double scale_max = 2.0;
  double odom_sigma = 0.0;       // map-units of positional drift per step
};

/// Pinhole stand-in for the fixed-mount monocular camera.
struct CameraSpec {
  double horizontal_fov = 1.5707963267948966;  // radians
  double max_range = 6.0;                      // map-units
  int image_w = 640;
  int image_h = 480;
  double focal = 320.0;  // pixels
  double height = 0.3;   // camera height above the ground plane
};

/// Deterministic synthetic environment: objects, the scripted teach path,
/// and the sensing/noise models.
struct WorldSpec {
  std::vector<ObjectSpec> objects;
  std::vector<std::array<double, 2>> teach_path;  // ground-truth waypoints
  std::uint64_t seed = 1;
  NoiseSpec noise;
  CameraSpec camera;
  int features_per_object = 8;
};

struct Observation {
  std::vector<Detection> detections;
  std::vector<FeaturePoint> features;
};

/// One simulated run (teach or repeat): owns the robot's ground-truth state,
/// the run's private random stream, and the run's map frame — anchored at
/// the start pose and scaled by a freshly drawn per-run SLAM scale factor.
class SimRun {
 public:
  SimRun(const WorldSpec& world, const Pose& start, std::uint64_t run_seed,
         std::string map_id);

  const std::string& map_id() const { return map_id_; }
  const WorldSpec& world() const { return world_; }
  double scale() const { return scale_; }
  double time() const { return time_; }

  /// Robot state in the world frame (the motion-capture stand-in).
  Pose ground_truth() const { return ground_truth_; }

  /// Robot state as the SLAM front-end reports it: start-pose frame, scaled
  /// by the run's scale factor, plus accumulated odometry drift.
  Pose odometry() const;

  /// Unicycle step under `cmd`; returns the new ground-truth pose.
  Pose robot_step(const ControlCommand& cmd, double dt);

  /// Detections and features visible from the current pose.
  Observation observe() { return observe(ground_truth_); }

  /// Detections and features visible from an arbitrary ground-truth pose.
  /// An object is detected when its anchor lies inside the horizontal
  /// frustum (|bearing| <= fov/2, horizontal distance <= max_range) and its
  /// projected box, clamped to the image, is nonempty.
  Observation observe(const Pose& ground_truth_pose);

  /// Maps a world-frame point into this run's map frame.
  Vec3 map_from_world(const Vec3& p) const;
  Pose map_from_world(const Pose& p) const;

  /// Inverse of map_from_world.
  Vec3 world_from_map(const Vec3& p) const;
  Pose world_from_map(const Pose& p) const;

 private:
  WorldSpec world_;
  std::string map_id_;
  Pose start_;
  double scale_ = 1.0;
  Pose ground_truth_;
  Vec2 odom_drift_;
  double time_ = 0.0;
  int frame_counter_ = 0;
  std::mt19937_64 rng_;
};

/// Creates a run whose map frame originates at `start` with a per-run scale
/// factor drawn from the world's configured range.
SimRun spawn_run(const WorldSpec& world, const Pose& start,
                 std::uint64_t run_seed, std::string map_id);

/// Returns a copy of `world` with the listed objects moved. For a duplicated
/// label the first occurrence moves. Throws UnknownLabel.
WorldSpec perturb_objects(const WorldSpec& world,
                          std::span<const std::pair<std::string, Vec3>> moves);

/// One scripted motion primitive of the bootstrap path.
struct TimedCommand {
  ControlCommand command;
  double duration = 0.0;  // seconds
};

/// Short scripted motion that initializes a repeat run's map: executes the
/// script, feeding observations into `builder`, and stops early once
/// `min_unique_objects` unique objects are mapped (checked between script
/// commands). When `reference` is given (the teach map, available online
/// during a repeat run), only objects whose label is also unique there are
/// counted, since only those can serve the relocalizer. Appends ground-truth
/// rows (phase "bootstrap") to `trace`. Throws BootstrapFailed if the script
/// ends below the threshold.
void bootstrap_motion(SimRun& run, std::span<const TimedCommand> script,
                      MapBuilder& builder, double dt, Trace& trace,
                      size_t min_unique_objects = 3,
                      const SemanticMap* reference = nullptr);

/// World file persistence (JSON). Throws SchemaError/IoError like load_map.
WorldSpec load_world(const std::filesystem::path& path);
void save_world(const WorldSpec& world, const std::filesystem::path& path);

}  // namespace vtr
