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

#include "vtr/repeater.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vtr/errors.hpp"

namespace vtr {

namespace {

double planar_distance(const Pose& a, const Pose& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

size_t closest_keyframe(std::span<const Pose> path, const Pose& pose) {
  if (path.empty()) throw EmptyPath("keyframe path is empty");
  size_t best = 0;
  double best_dist = planar_distance(path[0], pose);
  for (size_t i = 1; i < path.size(); ++i) {
    const double d = planar_distance(path[i], pose);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

size_t next_goal(std::span<const Pose> path, size_t current, Direction direction,
                 double lookahead) {
  if (current >= path.size()) throw std::out_of_range("keyframe index out of range");
  const bool forward = direction == Direction::forward;
  if (forward ? current + 1 >= path.size() : current == 0) return current;

  size_t goal = current;
  double arc = 0.0;
  size_t i = current;
  while (forward ? i + 1 < path.size() : i > 0) {
    const size_t j = forward ? i + 1 : i - 1;
    arc += planar_distance(path[i], path[j]);
    if (arc > lookahead) break;
    goal = j;
    i = j;
  }
  if (goal == current) goal = forward ? current + 1 : current - 1;
  return goal;
}

ControlCommand control_step(const Pose& pose, const Vec2& goal,
                            const RepeatPlan& plan, const ControlLimits& limits) {
  const double dx = goal.x - pose.x;
  const double dy = goal.y - pose.y;
  const double dist = std::hypot(dx, dy);
  if (dist <= plan.goal_tolerance) return {0.0, 0.0};

  const double bearing_error = wrap_angle(std::atan2(dy, dx) - pose.heading);
  if (std::abs(bearing_error) > plan.heading_deadband) {
    return {0.0, std::copysign(limits.omega_max, bearing_error)};
  }
  const double omega = std::clamp(limits.k_heading * bearing_error,
                                  -limits.omega_max, limits.omega_max);
  return {std::min(limits.v_max, limits.k_distance * dist), omega};
}

RepeatTrace run_repeat(const SemanticMap& teach, const RelocalizationResult& reloc,
                       const Pose& start_repeat_pose, Direction direction,
                       SimRun& sim, const RepeatPlan& plan_options,
                       const ControlLimits& limits, double dt, size_t step_budget) {
  if (teach.keyframes.size() < 2) {
    throw EmptyPath("repeat requires a teach path with at least 2 keyframes");
  }
  if (plan_options.lookahead <= 0.0 || plan_options.lookahead > 1.0) {
    throw std::invalid_argument("lookahead must be in (0, 1] map-units");
  }
  const std::span<const Pose> path(teach.keyframes);

  RepeatTrace trace;
  trace.plan = plan_options;
  trace.plan.direction = direction;
  trace.plan.start_index =
      closest_keyframe(path, relocalize_pose(reloc, start_repeat_pose));

  const size_t terminal =
      direction == Direction::forward ? path.size() - 1 : 0;
  size_t goal_index = trace.plan.start_index;
  bool approaching = true;

  const auto record = [&](const char* phase) {
    const Pose gt = sim.ground_truth();
    trace.points.push_back({sim.time(), gt.x, gt.y, gt.heading, phase,
                            static_cast<int>(goal_index)});
  };

  record("approach");
  while (trace.steps < step_budget) {
    const Pose here = relocalize_pose(reloc, sim.odometry());
    const Pose& goal_kf = path[goal_index];
    if (planar_distance(here, goal_kf) <= trace.plan.goal_tolerance) {
      if (!approaching && goal_index == terminal) {
        trace.completed = true;
        record("done");
        return trace;
      }
      if (approaching) {
        approaching = false;
        if (goal_index == terminal) {
          trace.completed = true;
          record("done");
          return trace;
        }
      }
      goal_index = next_goal(path, goal_index, direction, trace.plan.lookahead);
      continue;
    }
    const ControlCommand cmd =
        control_step(here, {goal_kf.x, goal_kf.y}, trace.plan, limits);
    sim.robot_step(cmd, dt);
    ++trace.steps;
    record(approaching ? "approach" : "follow");
  }
  return trace;  // budget exhausted, completed stays false
}

}  // namespace vtr
