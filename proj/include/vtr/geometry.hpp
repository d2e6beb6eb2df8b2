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

#include <cmath>
#include <string>

namespace vtr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Vec3 operator*(double s, const Vec3& v) {
  return {s * v.x, s * v.y, s * v.z};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

/// Length of the horizontal (x, y) component.
inline double horizontal_norm(const Vec3& v) { return std::hypot(v.x, v.y); }
inline double horizontal_distance(const Vec3& a, const Vec3& b) {
  return horizontal_norm(a - b);
}

/// Normalizes an angle to (-pi, pi].
double wrap_angle(double radians);

/// Planar rigid transform: rotation `alpha` about the vertical axis followed
/// by translation (dx, dy). The vertical coordinate is always left unchanged.
struct PlanarTransform {
  double alpha = 0.0;  ///< radians, normalized to (-pi, pi]
  double dx = 0.0;
  double dy = 0.0;

  static PlanarTransform identity() { return {}; }
};

/// Robot/camera state in a named map frame. Planar motion only: position is
/// 3D for bookkeeping, orientation is a single heading about the vertical.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double heading = 0.0;  ///< radians, normalized to (-pi, pi]
  std::string frame_id;

  Vec3 position() const { return {x, y, z}; }
};

/// 2D coordinate frame anchored on an ordered object pair: origin at the
/// first object, y-axis along the horizontal direction toward the second,
/// x-axis the cross product of the y-axis with the up direction.
struct PairFrame {
  Vec3 origin;
  Vec2 y_axis;
  Vec2 x_axis;
};

/// Composition: applying the result is equivalent to applying `b`, then `a`.
PlanarTransform compose(const PlanarTransform& a, const PlanarTransform& b);

/// Group inverse: compose(t, invert(t)) is the identity.
PlanarTransform invert(const PlanarTransform& t);

/// Rotates (x, y) by alpha, translates by (dx, dy); z passes through.
Vec3 apply_point(const PlanarTransform& t, const Vec3& p);

/// Position mapped as apply_point; heading shifted by alpha and renormalized.
/// The frame_id is preserved (callers owning a frame change rewrite it).
Pose apply_pose(const PlanarTransform& t, const Pose& p);

/// Builds the pair frame for (first, second).
/// Throws DegeneratePair if the horizontal separation is below 1e-9.
PairFrame build_pair_frame(const Vec3& first, const Vec3& second);

/// The map->pair-frame transform: sends the first object to (0, 0, z_first)
/// and the second onto the +y axis.
PlanarTransform map_to_pair_transform(const PairFrame& frame);

}  // namespace vtr
