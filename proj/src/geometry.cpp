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

#include "vtr/geometry.hpp"

#include <cmath>
#include <numbers>

#include "vtr/errors.hpp"

namespace vtr {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateSeparation = 1e-9;
}  // namespace

double wrap_angle(double radians) {
  double a = std::fmod(radians, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

PlanarTransform compose(const PlanarTransform& a, const PlanarTransform& b) {
  const double c = std::cos(a.alpha);
  const double s = std::sin(a.alpha);
  return {wrap_angle(a.alpha + b.alpha),
          c * b.dx - s * b.dy + a.dx,
          s * b.dx + c * b.dy + a.dy};
}

PlanarTransform invert(const PlanarTransform& t) {
  const double c = std::cos(t.alpha);
  const double s = std::sin(t.alpha);
  // R(-alpha) * -(dx, dy)
  return {wrap_angle(-t.alpha), -(c * t.dx + s * t.dy), s * t.dx - c * t.dy};
}

Vec3 apply_point(const PlanarTransform& t, const Vec3& p) {
  const double c = std::cos(t.alpha);
  const double s = std::sin(t.alpha);
  return {c * p.x - s * p.y + t.dx, s * p.x + c * p.y + t.dy, p.z};
}

Pose apply_pose(const PlanarTransform& t, const Pose& p) {
  const Vec3 q = apply_point(t, p.position());
  return {q.x, q.y, q.z, wrap_angle(p.heading + t.alpha), p.frame_id};
}

PairFrame build_pair_frame(const Vec3& first, const Vec3& second) {
  const double sep = horizontal_distance(first, second);
  if (sep < kDegenerateSeparation) {
    throw DegeneratePair("pair objects horizontally separated by less than 1e-9");
  }
  PairFrame frame;
  frame.origin = first;
  frame.y_axis = {(second.x - first.x) / sep, (second.y - first.y) / sep};
  // cross(y_axis, up) with up = +z
  frame.x_axis = {frame.y_axis.y, -frame.y_axis.x};
  return frame;
}

PlanarTransform map_to_pair_transform(const PairFrame& frame) {
  // The frame axes, as columns, rotate pair coords into map coords; the
  // map->frame rotation is its transpose, with angle atan2(y_x, y_y).
  const double alpha = std::atan2(frame.y_axis.x, frame.y_axis.y);
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return {wrap_angle(alpha),
          -(c * frame.origin.x - s * frame.origin.y),
          -(s * frame.origin.x + c * frame.origin.y)};
}

}  // namespace vtr
