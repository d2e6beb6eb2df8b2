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

#include <cstddef>
#include <span>
#include <vector>

#include "vtr/control.hpp"
#include "vtr/geometry.hpp"
#include "vtr/relocalizer.hpp"
#include "vtr/semantic_map.hpp"
#include "vtr/simworld.hpp"

namespace vtr {

enum class Direction { forward, backward };

/// Parameters of one repeat traversal. Goal points are taken from the teach
/// keyframes, never more than `lookahead` map-units of arc ahead.
struct RepeatPlan {
  Direction direction = Direction::forward;
  size_t start_index = 0;          ///< first goal keyframe
  double goal_tolerance = 0.05;    ///< map-units
  double lookahead = 1.0;          ///< map-units, must be in (0, 1]
  double heading_deadband = 0.0872664625997165;  ///< 5 degrees
};

struct RepeatTrace {
  Trace points;
  bool completed = false;  ///< false when the step budget ran out
  RepeatPlan plan;         ///< with start_index resolved
  size_t steps = 0;
};

/// Index of the keyframe closest (planar distance) to `pose`; ties resolve
/// to the smallest index. Throws EmptyPath.
size_t closest_keyframe(std::span<const Pose> path, const Pose& pose);

/// Next goal after `current`: the farthest keyframe within `lookahead`
/// cumulative arc distance toward the traversal end (at least one step when
/// any remain); the terminal index returns itself.
size_t next_goal(std::span<const Pose> path, size_t current, Direction direction,
                 double lookahead);

/// Rotate-then-drive proportional controller: beyond the heading deadband it
/// spins in place at full rate toward the goal; inside it, it drives with
/// speed proportional to distance. Within goal_tolerance it outputs zero.
ControlCommand control_step(const Pose& pose, const Vec2& goal,
                            const RepeatPlan& plan, const ControlLimits& limits);

/// Closed-loop repeat: relocalizes the start pose into the teach frame,
/// approaches the closest keyframe, then walks the keyframe list to its end
/// (forward) or start (backward). The returned trace holds ground-truth rows
/// with phase labels; `completed` is false when `step_budget` was exhausted.
RepeatTrace run_repeat(const SemanticMap& teach, const RelocalizationResult& reloc,
                       const Pose& start_repeat_pose, Direction direction,
                       SimRun& sim, const RepeatPlan& plan_options,
                       const ControlLimits& limits, double dt, size_t step_budget);

}  // namespace vtr
