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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vtr/control.hpp"
#include "vtr/repeater.hpp"
#include "vtr/semantic_map.hpp"
#include "vtr/simworld.hpp"

namespace vtr {

/// All tunables of the pipeline, overridable from a JSON config file.
struct EvalConfig {
  MapBuildConfig map;
  ControlLimits limits;
  double goal_tolerance = 0.05;     // map-units
  double lookahead = 1.0;           // map-units
  double heading_deadband = 0.0872664625997165;  // 5 degrees
  double dt = 0.05;                 // seconds per control step
  size_t step_budget = 20000;
  size_t bootstrap_min_objects = 3;
};

/// Merges keys present in a JSON config file over the defaults.
EvalConfig load_config(const std::filesystem::path& path);

/// Per-trial evaluation record. Distances are map-units in the ground-truth
/// frame; angles are degrees in [0, 180].
struct TrialReport {
  int trial_id = 0;
  Direction direction = Direction::forward;
  double start_distance = 0.0;
  double end_distance = 0.0;
  double start_angle_diff = 0.0;
  double end_angle_diff = 0.0;
  bool completed = false;
  double gamma = 0.0;
  std::string pair_i;
  std::string pair_j;
  double cross_track_rms = 0.0;  // follow phase diagnostic, not a Table metric
};

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

/// Aggregate over the completed trials of a batch.
struct BatchSummary {
  size_t total = 0;
  size_t completed = 0;
  MetricStats start_distance;
  MetricStats end_distance;
  MetricStats start_angle_diff;
  MetricStats end_angle_diff;
};

/// Teach-phase output: the saved-ready map (meta carries the run seed, the
/// SLAM scale factor, and the ground-truth start pose) plus the driven
/// ground-truth trace.
struct TeachResult {
  SemanticMap map;
  Trace trace;
  double scale = 1.0;
};

/// Drives the robot along the world's teach path and builds the teach map.
TeachResult run_teach(const WorldSpec& world, const Pose& start_ground_truth,
                      std::uint64_t run_seed, const EvalConfig& config);

/// Everything one repeat trial produces. `exit_code` follows the CLI table:
/// 0 ok, 4 bootstrap/relocalization failed, 5 step budget exceeded.
struct TrialOutcome {
  TrialReport report;
  Trace trace;
  int exit_code = 0;
  std::optional<RelocalizationResult> relocalization;
};

/// One full repeat trial: bootstrap motion, repeat-map build, relocalization,
/// closed-loop traversal, metric computation. Never throws for the failure
/// modes encoded in exit_code.
TrialOutcome run_repeat_trial(const WorldSpec& world, const SemanticMap& teach,
                              const Pose& start_ground_truth, Direction direction,
                              std::uint64_t run_seed, const EvalConfig& config,
                              int trial_id);

/// Batch evaluation over a list of ground-truth start poses. Trials run on a
/// worker pool; outputs are ordered by trial id so results are independent
/// of scheduling.
struct BatchResult {
  std::vector<TrialReport> reports;
  BatchSummary summary;
};

BatchResult run_eval_batch(const WorldSpec& world, const SemanticMap& teach,
                           const std::vector<Pose>& starts, Direction direction,
                           std::uint64_t base_seed, const EvalConfig& config);

/// Start/end distance and angle metrics of a trace against the teach path,
/// computed in the simulator's ground-truth frame (recovered from the teach
/// map's meta). Start metrics anchor to the first teach keyframe; end
/// metrics anchor to the last (forward) or first (backward).
struct TrialMetrics {
  double start_distance = 0.0;
  double end_distance = 0.0;
  double start_angle_diff = 0.0;
  double end_angle_diff = 0.0;
  double cross_track_rms = 0.0;
};

TrialMetrics compute_metrics(const SemanticMap& teach, const Trace& trace,
                             Direction direction);

/// Summary statistics over the completed trials of `reports`.
BatchSummary summarize(const std::vector<TrialReport>& reports);

/// Serialization helpers. CSV output is byte-stable for fixed inputs.
std::string trace_to_csv(const Trace& trace);
std::string reports_to_csv(const std::vector<TrialReport>& reports);
std::string report_to_json(const TrialReport& report);
std::string summary_to_json(const BatchSummary& summary, Direction direction);

/// The scripted bootstrap motion used by the repeat commands: a full
/// in-place rotation, split so the early-exit check can trigger part-way.
std::vector<TimedCommand> default_bootstrap_script();

Direction parse_direction(const std::string& text);  // "fwd" | "bwd"

/// CLI backends. Return the process exit status and write diagnostics to
/// `err`; see the README for the exit-code table.
int cmd_teach(const std::string& world_file, const Pose& start,
              const std::string& out_map_file, std::uint64_t seed,
              const EvalConfig& config, std::ostream& out, std::ostream& err);
int cmd_repeat(const std::string& world_file, const std::string& teach_map_file,
               const Pose& start, Direction direction,
               const std::string& out_trace_file, std::uint64_t seed,
               const EvalConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const std::string& world_file, const std::string& teach_map_file,
             const std::string& starts_file, Direction direction,
             const std::string& out_csv_file, std::uint64_t seed,
             const EvalConfig& config, std::ostream& out, std::ostream& err);
int cmd_perturb(const std::string& world_file, const std::string& moves_file,
                const std::string& out_world_file, std::ostream& out,
                std::ostream& err);

/// Parses "x,y,heading_deg" (heading in degrees) into a ground-truth pose.
Pose parse_start_pose(const std::string& text);

}  // namespace vtr
