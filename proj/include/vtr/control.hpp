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

#include <string>
#include <vector>

namespace vtr {

/// Unicycle actuation command.
struct ControlCommand {
  double linear_velocity = 0.0;   // map-units/s
  double angular_velocity = 0.0;  // rad/s
};

/// Actuation limits and proportional gains of the rotate-then-drive scheme.
struct ControlLimits {
  double v_max = 0.5;        // map-units/s
  double omega_max = 1.0;    // rad/s
  double k_distance = 1.0;   // linear gain on goal distance
  double k_heading = 2.0;    // angular gain on bearing error
};

/// One sample of an executed trajectory. Positions and heading are the
/// simulator's ground truth (the motion-capture stand-in); `phase` is one of
/// bootstrap|approach|follow|done and `goal_index` the active keyframe goal
/// (-1 while bootstrapping).
struct TracePoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  std::string phase;
  int goal_index = -1;
};

using Trace = std::vector<TracePoint>;

}  // namespace vtr
