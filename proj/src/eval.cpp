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

#include "vtr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vtr/errors.hpp"
#include "vtr/relocalizer.hpp"

namespace vtr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* direction_name(Direction d) {
  return d == Direction::forward ? "fwd" : "bwd";
}

/// Ground-truth frame of a teach map, recovered from its meta block.
struct WorldAnchor {
  Pose start;    // ground-truth pose of the map origin
  double scale;  // the run's SLAM scale factor
};

double meta_number(const SemanticMap& map, const std::string& key) {
  auto it = map.meta.find(key);
  if (it == map.meta.end()) {
    throw SchemaError("meta." + key, "teach map lacks the ground-truth anchor");
  }
  return std::stod(it->second);
}

WorldAnchor anchor_from_meta(const SemanticMap& map) {
  WorldAnchor anchor;
  anchor.start.x = meta_number(map, "gt_start_x");
  anchor.start.y = meta_number(map, "gt_start_y");
  anchor.start.heading = meta_number(map, "gt_start_heading");
  anchor.scale = meta_number(map, "scale");
  return anchor;
}

Pose world_from_map_pose(const WorldAnchor& anchor, const Pose& p) {
  const double c = std::cos(anchor.start.heading);
  const double s = std::sin(anchor.start.heading);
  const double x = p.x / anchor.scale;
  const double y = p.y / anchor.scale;
  return {anchor.start.x + c * x - s * y, anchor.start.y + s * x + c * y,
          p.z / anchor.scale, wrap_angle(p.heading + anchor.start.heading),
          "world"};
}

double angle_diff_deg(double a, double b) {
  return std::abs(wrap_angle(a - b)) * kRadToDeg;
}

double point_segment_distance(double px, double py, double ax, double ay,
                              double bx, double by) {
  const double vx = bx - ax;
  const double vy = by - ay;
  const double len_sq = vx * vx + vy * vy;
  double t = 0.0;
  if (len_sq > 0.0) {
    t = std::clamp(((px - ax) * vx + (py - ay) * vy) / len_sq, 0.0, 1.0);
  }
  return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

std::uint64_t trial_seed(std::uint64_t base, size_t index) {
  return base + 0x9E3779B97F4A7C15ULL * (index + 1);
}

MetricStats stats_of(const std::vector<double>& values) {
  MetricStats out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / values.size();
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(var / values.size());
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e)) return 2;
  if (dynamic_cast<const UnknownLabel*>(&e)) return 2;
  return 1;
}

}  // namespace

Direction parse_direction(const std::string& text) {
  if (text == "fwd" || text == "forward") return Direction::forward;
  if (text == "bwd" || text == "backward") return Direction::backward;
  throw std::invalid_argument("direction must be fwd or bwd, got '" + text + "'");
}

Pose parse_start_pose(const std::string& text) {
  double x = 0.0, y = 0.0, heading_deg = 0.0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &x, &y, &heading_deg, &extra) != 3) {
    throw std::invalid_argument("start pose must be \"x,y,heading_deg\", got '" +
                                text + "'");
  }
  return {x, y, 0.0, wrap_angle(heading_deg * kDegToRad), "world"};
}

EvalConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("(document)", e.what());
  }
  if (!doc.is_object()) throw SchemaError("(document)", "expected an object");

  EvalConfig cfg;
  const auto number = [&](const char* key, double& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw SchemaError(key, "expected a number");
    field = doc[key].get<double>();
  };
  number("pixel_radius", cfg.map.pixel_radius);
  number("border_margin", cfg.map.border_margin);
  number("dedup_threshold", cfg.map.dedup_threshold);
  number("keyframe_min_spacing", cfg.map.keyframe_min_spacing);
  number("goal_tolerance", cfg.goal_tolerance);
  number("lookahead", cfg.lookahead);
  number("v_max", cfg.limits.v_max);
  number("omega_max", cfg.limits.omega_max);
  number("k_distance", cfg.limits.k_distance);
  number("k_heading", cfg.limits.k_heading);
  number("dt", cfg.dt);
  const auto integer = [&](const char* key, auto& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer()) throw SchemaError(key, "expected an integer");
    field = doc[key].get<std::decay_t<decltype(field)>>();
  };
  integer("min_features", cfg.map.min_features);
  integer("step_budget", cfg.step_budget);
  integer("bootstrap_min_objects", cfg.bootstrap_min_objects);
  if (doc.contains("heading_deadband_deg")) {
    if (!doc["heading_deadband_deg"].is_number()) {
      throw SchemaError("heading_deadband_deg", "expected a number");
    }
    cfg.heading_deadband = doc["heading_deadband_deg"].get<double>() * kDegToRad;
  }
  return cfg;
}

std::vector<TimedCommand> default_bootstrap_script() {
  // A full in-place turn, quartered so the early-exit check runs part-way.
  constexpr double omega = 0.8;
  const double quarter = (0.5 * std::numbers::pi) / omega;
  return std::vector<TimedCommand>(4, TimedCommand{{0.0, omega}, quarter});
}

TeachResult run_teach(const WorldSpec& world, const Pose& start_ground_truth,
                      std::uint64_t run_seed, const EvalConfig& config) {
  SimRun run = spawn_run(world, start_ground_truth, run_seed, "teach");
  MapBuilder builder("teach", config.map, world.camera.image_w,
                     world.camera.image_h);

  TeachResult result;
  const RepeatPlan drive_plan{Direction::forward, 0, config.goal_tolerance,
                              config.lookahead, config.heading_deadband};

  size_t steps = 0;
  const size_t budget = config.step_budget * 10;
  const auto ingest = [&](int waypoint) {
    const Observation obs = run.observe();
    builder.ingest(obs.detections, obs.features, run.odometry());
    const Pose gt = run.ground_truth();
    result.trace.push_back({run.time(), gt.x, gt.y, gt.heading, "teach", waypoint});
  };

  ingest(0);
  for (size_t w = 0; w < world.teach_path.size(); ++w) {
    const Vec2 goal{world.teach_path[w][0], world.teach_path[w][1]};
    while (true) {
      const Pose gt = run.ground_truth();
      const ControlCommand cmd = control_step(gt, goal, drive_plan, config.limits);
      if (cmd.linear_velocity == 0.0 && cmd.angular_velocity == 0.0) break;
      run.robot_step(cmd, config.dt);
      ingest(static_cast<int>(w));
      if (++steps > budget) {
        throw std::runtime_error("teach drive exceeded its step budget");
      }
    }
  }

  result.map = builder.take_map();
  result.map.meta["seed"] = std::to_string(run_seed);
  result.map.meta["scale"] = fmt_double(run.scale());
  result.map.meta["gt_start_x"] = fmt_double(start_ground_truth.x);
  result.map.meta["gt_start_y"] = fmt_double(start_ground_truth.y);
  result.map.meta["gt_start_heading"] = fmt_double(start_ground_truth.heading);
  result.scale = run.scale();
  return result;
}

TrialMetrics compute_metrics(const SemanticMap& teach, const Trace& trace,
                             Direction direction) {
  if (trace.empty()) throw EmptyPath("cannot compute metrics of an empty trace");
  if (teach.keyframes.empty()) throw EmptyPath("teach map has no keyframes");
  const WorldAnchor anchor = anchor_from_meta(teach);

  const Pose first_kf = world_from_map_pose(anchor, teach.keyframes.front());
  const Pose last_kf = world_from_map_pose(anchor, teach.keyframes.back());
  const Pose& end_anchor = direction == Direction::forward ? last_kf : first_kf;

  TrialMetrics m;
  const TracePoint& first = trace.front();
  const TracePoint& last = trace.back();
  m.start_distance = std::hypot(first.x - first_kf.x, first.y - first_kf.y);
  m.start_angle_diff = angle_diff_deg(first.heading, first_kf.heading);
  m.end_distance = std::hypot(last.x - end_anchor.x, last.y - end_anchor.y);
  m.end_angle_diff = angle_diff_deg(last.heading, end_anchor.heading);

  // RMS distance to the teach polyline over the follow phase (diagnostic).
  std::vector<Pose> path_world;
  path_world.reserve(teach.keyframes.size());
  for (const Pose& kf : teach.keyframes) {
    path_world.push_back(world_from_map_pose(anchor, kf));
  }
  double sum_sq = 0.0;
  size_t count = 0;
  for (const TracePoint& p : trace) {
    if (p.phase != "follow") continue;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < path_world.size(); ++i) {
      best = std::min(best, point_segment_distance(p.x, p.y, path_world[i].x,
                                                   path_world[i].y,
                                                   path_world[i + 1].x,
                                                   path_world[i + 1].y));
    }
    sum_sq += best * best;
    ++count;
  }
  m.cross_track_rms = count == 0 ? 0.0 : std::sqrt(sum_sq / count);
  return m;
}

TrialOutcome run_repeat_trial(const WorldSpec& world, const SemanticMap& teach,
                              const Pose& start_ground_truth, Direction direction,
                              std::uint64_t run_seed, const EvalConfig& config,
                              int trial_id) {
  TrialOutcome outcome;
  outcome.report.trial_id = trial_id;
  outcome.report.direction = direction;

  SimRun run = spawn_run(world, start_ground_truth, run_seed, "repeat");
  MapBuilder builder("repeat", config.map, world.camera.image_w,
                     world.camera.image_h);

  const auto finish_metrics = [&] {
    const TrialMetrics m = compute_metrics(teach, outcome.trace, direction);
    outcome.report.start_distance = m.start_distance;
    outcome.report.end_distance = m.end_distance;
    outcome.report.start_angle_diff = m.start_angle_diff;
    outcome.report.end_angle_diff = m.end_angle_diff;
    outcome.report.cross_track_rms = m.cross_track_rms;
  };

  const std::vector<TimedCommand> script = default_bootstrap_script();
  try {
    bootstrap_motion(run, script, builder, config.dt, outcome.trace,
                     config.bootstrap_min_objects, &teach);
    const SemanticMap repeat_map = builder.take_map();
    outcome.relocalization = find_best_pair(teach, repeat_map);
  } catch (const BootstrapFailed&) {
    outcome.exit_code = 4;
  } catch (const InsufficientLandmarks&) {
    outcome.exit_code = 4;
  } catch (const NoValidPair&) {
    outcome.exit_code = 4;
  }
  if (outcome.exit_code != 0) {
    finish_metrics();
    return outcome;
  }

  outcome.report.gamma = outcome.relocalization->gamma;
  outcome.report.pair_i = outcome.relocalization->label_i;
  outcome.report.pair_j = outcome.relocalization->label_j;

  const RepeatPlan plan{direction, 0, config.goal_tolerance, config.lookahead,
                        config.heading_deadband};
  RepeatTrace repeat = run_repeat(teach, *outcome.relocalization, run.odometry(),
                                  direction, run, plan, config.limits, config.dt,
                                  config.step_budget);
  outcome.trace.insert(outcome.trace.end(), repeat.points.begin(),
                       repeat.points.end());
  outcome.report.completed = repeat.completed;
  if (!repeat.completed) outcome.exit_code = 5;
  finish_metrics();
  return outcome;
}

BatchResult run_eval_batch(const WorldSpec& world, const SemanticMap& teach,
                           const std::vector<Pose>& starts, Direction direction,
                           std::uint64_t base_seed, const EvalConfig& config) {
  anchor_from_meta(teach);  // surface a bad map here, not inside a worker

  std::vector<TrialReport> reports(starts.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < starts.size(); i = next.fetch_add(1)) {
      try {
        reports[i] = run_repeat_trial(world, teach, starts[i], direction,
                                      trial_seed(base_seed, i), config,
                                      static_cast<int>(i))
                         .report;
      } catch (const std::exception&) {
        // partial failures are recorded, never abort the batch
        reports[i].trial_id = static_cast<int>(i);
        reports[i].direction = direction;
        reports[i].completed = false;
      }
    }
  };

  const size_t workers = std::min<size_t>(
      starts.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  BatchResult result;
  result.reports = std::move(reports);
  result.summary = summarize(result.reports);
  return result;
}

BatchSummary summarize(const std::vector<TrialReport>& reports) {
  BatchSummary summary;
  summary.total = reports.size();
  std::vector<double> start_d, end_d, start_a, end_a;
  for (const TrialReport& r : reports) {
    if (!r.completed) continue;
    ++summary.completed;
    start_d.push_back(r.start_distance);
    end_d.push_back(r.end_distance);
    start_a.push_back(r.start_angle_diff);
    end_a.push_back(r.end_angle_diff);
  }
  summary.start_distance = stats_of(start_d);
  summary.end_distance = stats_of(end_d);
  summary.start_angle_diff = stats_of(start_a);
  summary.end_angle_diff = stats_of(end_a);
  return summary;
}

std::string trace_to_csv(const Trace& trace) {
  std::ostringstream out;
  out << "t,x,y,heading,phase,goal_index\n";
  for (const TracePoint& p : trace) {
    out << fmt_double(p.t) << ',' << fmt_double(p.x) << ',' << fmt_double(p.y)
        << ',' << fmt_double(p.heading) << ',' << p.phase << ',' << p.goal_index
        << '\n';
  }
  return out.str();
}

std::string reports_to_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "trial_id,direction,start_distance,end_distance,start_angle_diff,"
         "end_angle_diff,completed,gamma,pair_i,pair_j,cross_track_rms\n";
  for (const TrialReport& r : reports) {
    out << r.trial_id << ',' << direction_name(r.direction) << ','
        << fmt_double(r.start_distance) << ',' << fmt_double(r.end_distance)
        << ',' << fmt_double(r.start_angle_diff) << ','
        << fmt_double(r.end_angle_diff) << ',' << (r.completed ? 1 : 0) << ','
        << fmt_double(r.gamma) << ',' << r.pair_i << ',' << r.pair_j << ','
        << fmt_double(r.cross_track_rms) << '\n';
  }
  return out.str();
}

std::string report_to_json(const TrialReport& r) {
  ordered_json doc;
  doc["trial_id"] = r.trial_id;
  doc["direction"] = direction_name(r.direction);
  doc["start_distance"] = r.start_distance;
  doc["end_distance"] = r.end_distance;
  doc["start_angle_diff"] = r.start_angle_diff;
  doc["end_angle_diff"] = r.end_angle_diff;
  doc["completed"] = r.completed;
  doc["gamma"] = r.gamma;
  doc["chosen_pair"] = {r.pair_i, r.pair_j};
  doc["cross_track_rms"] = r.cross_track_rms;
  return doc.dump(2);
}

std::string summary_to_json(const BatchSummary& s, Direction direction) {
  ordered_json doc;
  doc["direction"] = direction_name(direction);
  doc["trials"] = s.total;
  doc["completed"] = s.completed;
  const auto stats = [&](const MetricStats& m) -> ordered_json {
    if (s.completed == 0) return {{"mean", nullptr}, {"stddev", nullptr}};
    return {{"mean", m.mean}, {"stddev", m.stddev}};
  };
  doc["metrics"] = {{"start_distance", stats(s.start_distance)},
                    {"end_distance", stats(s.end_distance)},
                    {"start_angle_diff", stats(s.start_angle_diff)},
                    {"end_angle_diff", stats(s.end_angle_diff)}};
  return doc.dump(2);
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<Pose> load_starts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("(document)", e.what());
  }
  if (!doc.is_array() || doc.empty()) {
    throw SchemaError("(document)", "expected a non-empty array of [x, y, heading_deg]");
  }
  std::vector<Pose> starts;
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& row = doc[i];
    const std::string p = "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != 3 || !row[0].is_number() ||
        !row[1].is_number() || !row[2].is_number()) {
      throw SchemaError(p, "expected [x, y, heading_deg]");
    }
    starts.push_back({row[0].get<double>(), row[1].get<double>(), 0.0,
                      wrap_angle(row[2].get<double>() * kDegToRad), "world"});
  }
  return starts;
}

std::vector<std::pair<std::string, Vec3>> load_moves(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("(document)", e.what());
  }
  if (!doc.is_array()) throw SchemaError("(document)", "expected an array of moves");
  std::vector<std::pair<std::string, Vec3>> moves;
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& row = doc[i];
    const std::string p = "[" + std::to_string(i) + "]";
    if (!row.is_object() || !row.contains("label") || !row["label"].is_string() ||
        !row.contains("pos") || !row["pos"].is_array() || row["pos"].size() != 3) {
      throw SchemaError(p, "expected {\"label\": .., \"pos\": [x, y, z]}");
    }
    moves.emplace_back(row["label"].get<std::string>(),
                       Vec3{row["pos"][0].get<double>(), row["pos"][1].get<double>(),
                            row["pos"][2].get<double>()});
  }
  return moves;
}

}  // namespace

int cmd_teach(const std::string& world_file, const Pose& start,
              const std::string& out_map_file, std::uint64_t seed,
              const EvalConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const WorldSpec world = load_world(world_file);
    const TeachResult result = run_teach(world, start, seed, config);
    const size_t unique = unique_landmarks(result.map).size();
    save_map(result.map, out_map_file);
    out << "landmarks: " << result.map.landmarks.size() << " (" << unique
        << " unique), keyframes: " << result.map.keyframes.size() << "\n";
    if (unique < 3) {
      err << "teach map has fewer than 3 unique landmarks\n";
      return 3;
    }
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_repeat(const std::string& world_file, const std::string& teach_map_file,
               const Pose& start, Direction direction,
               const std::string& out_trace_file, std::uint64_t seed,
               const EvalConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const WorldSpec world = load_world(world_file);
    const SemanticMap teach = load_map(teach_map_file);
    const TrialOutcome outcome =
        run_repeat_trial(world, teach, start, direction, seed, config, 0);
    write_file(out_trace_file, trace_to_csv(outcome.trace));
    out << report_to_json(outcome.report) << "\n";
    if (outcome.exit_code == 4) err << "relocalization failed\n";
    if (outcome.exit_code == 5) err << "step budget exceeded\n";
    return outcome.exit_code;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_eval(const std::string& world_file, const std::string& teach_map_file,
             const std::string& starts_file, Direction direction,
             const std::string& out_csv_file, std::uint64_t seed,
             const EvalConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const WorldSpec world = load_world(world_file);
    const SemanticMap teach = load_map(teach_map_file);
    const std::vector<Pose> starts = load_starts(starts_file);
    const BatchResult result =
        run_eval_batch(world, teach, starts, direction, seed, config);
    write_file(out_csv_file, reports_to_csv(result.reports));
    const std::string summary = summary_to_json(result.summary, direction);
    std::filesystem::path summary_path(out_csv_file);
    summary_path.replace_extension(".summary.json");
    write_file(summary_path.string(), summary + "\n");
    out << summary << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

int cmd_perturb(const std::string& world_file, const std::string& moves_file,
                const std::string& out_world_file, std::ostream& out,
                std::ostream& err) {
  try {
    const WorldSpec world = load_world(world_file);
    const auto moves = load_moves(moves_file);
    const WorldSpec perturbed = perturb_objects(world, moves);
    save_world(perturbed, out_world_file);
    out << "moved " << moves.size() << " objects\n";
    return 0;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace vtr
