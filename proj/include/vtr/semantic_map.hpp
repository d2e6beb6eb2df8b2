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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vtr/geometry.hpp"

namespace vtr {

/// A mapped environmental object: semantic class, per-class instance index,
/// estimated 3D position in the owning map frame, and a uniqueness flag
/// (true iff no other landmark in the map shares the label).
struct Landmark {
  std::string label;
  int instance = 0;
  Vec3 position;
  bool unique = true;
};

/// Semantic map of one run: landmarks plus the keyframe trajectory, both
/// expressed in the run's own frame (origin at the start pose).
struct SemanticMap {
  std::string map_id;
  std::vector<Landmark> landmarks;
  std::vector<Pose> keyframes;
  std::map<std::string, std::string> meta;
};

/// Object detection in one image frame.
struct Detection {
  std::string label;
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;
  int frame = 0;
};

/// A tracked image feature with a triangulated 3D position in the map frame.
struct FeaturePoint {
  Vec2 pixel;
  Vec3 position;
};

enum class InsertOutcome { inserted, merged };
enum class KeyframeOutcome { appended, skipped };

/// Mean 3D position of the features whose pixel lies within `pixel_radius`
/// of the bounding box's upper-middle point ((u_min+u_max)/2, v_min).
/// Empty when fewer than `min_features` features qualify.
std::optional<Vec3> estimate_object_position(const Detection& det,
                                             std::span<const FeaturePoint> features,
                                             double pixel_radius,
                                             int min_features);

/// True (reject) iff any bounding box edge lies within `border_margin`
/// pixels of the image border.
bool reject_partial(const Detection& det, int image_w, int image_h,
                    double border_margin);

/// Adds a landmark unless one with the same label already sits within
/// `dedup_threshold`; uniqueness flags for the label are recomputed.
InsertOutcome insert_landmark(SemanticMap& map, const std::string& label,
                              const Vec3& position, double dedup_threshold);

/// Landmarks whose label appears exactly once in the map, in map order.
std::vector<Landmark> unique_landmarks(const SemanticMap& map);

/// Appends `pose` unless it is closer than `min_spacing` to the last
/// keyframe. Throws FrameMismatch if the pose belongs to another map.
KeyframeOutcome record_keyframe(SemanticMap& map, const Pose& pose,
                                double min_spacing);

/// JSON persistence. load_map(save_map(m)) reproduces m field for field.
/// Throws SchemaError (with field path) on malformed content, IoError on
/// filesystem failures. Unknown extra fields are ignored.
void save_map(const SemanticMap& map, const std::filesystem::path& path);
SemanticMap load_map(const std::filesystem::path& path);

/// Tuning for incremental map construction.
struct MapBuildConfig {
  double pixel_radius = 20.0;       // px, feature gate around bbox upper-middle
  int min_features = 3;             // features required for a position estimate
  double border_margin = 10.0;      // px, partial-visibility rejection band
  double dedup_threshold = 0.5;     // map-units, same-label merge distance
  double keyframe_min_spacing = 0.1;  // map-units
};

/// Incrementally builds a SemanticMap from per-frame detections, features,
/// and odometry poses. Used for both the teach sweep and the repeat-phase
/// bootstrap map.
class MapBuilder {
 public:
  MapBuilder(std::string map_id, const MapBuildConfig& config, int image_w,
             int image_h);

  /// Folds one frame into the map: records a keyframe (spacing-gated),
  /// drops partially visible detections, estimates positions for the rest.
  void ingest(std::span<const Detection> detections,
              std::span<const FeaturePoint> features, const Pose& odometry);

  const SemanticMap& map() const { return map_; }
  SemanticMap take_map() { return std::move(map_); }
  size_t unique_count() const;

 private:
  SemanticMap map_;
  MapBuildConfig config_;
  int image_w_;
  int image_h_;
};

}  // namespace vtr
