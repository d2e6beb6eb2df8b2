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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "vtr/errors.hpp"

using namespace vtr;

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

fs::path temp_path(const char* name) {
  return fs::temp_directory_path() / (std::string("vtr_eval_") + name);
}

SemanticMap anchored_teach_map() {
  SemanticMap map;
  map.map_id = "teach";
  map.meta["scale"] = "1";
  map.meta["gt_start_x"] = "0";
  map.meta["gt_start_y"] = "0";
  map.meta["gt_start_heading"] = "0";
  map.keyframes.push_back({0, 0, 0, 0, "teach"});
  map.keyframes.push_back({5, 0, 0, 0, "teach"});
  return map;
}

/// Small world with 5 unique objects ahead of a short straight path.
WorldSpec small_world() {
  WorldSpec world;
  world.noise.feature_sigma = 0.0;
  world.noise.scale_min = 1.0;
  world.noise.scale_max = 1.0;
  world.teach_path = {{0.0, 0.0}, {1.5, 0.0}, {3.0, 0.0}};
  world.objects = {
      {"clock", {2.5, 1.5, 0.9}, 0.2}, {"tv", {2.5, -1.5, 0.8}, 0.3},
      {"plant", {5.0, 2.0, 0.6}, 0.2}, {"sofa", {5.0, -2.0, 0.5}, 0.4},
      {"bottle", {4.5, 0.5, 0.7}, 0.15},
  };
  return world;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("parse helpers") {
  const Pose p = parse_start_pose("1.5,-2,90");
  CHECK(p.x == 1.5);
  CHECK(p.y == -2.0);
  CHECK(p.heading == doctest::Approx(kPi / 2.0));
  CHECK_THROWS_AS(parse_start_pose("1.5"), std::invalid_argument);

  CHECK(parse_direction("fwd") == Direction::forward);
  CHECK(parse_direction("bwd") == Direction::backward);
  CHECK_THROWS_AS(parse_direction("sideways"), std::invalid_argument);
}

TEST_CASE("compute_metrics: anchors and angle wrap") {
  const SemanticMap teach = anchored_teach_map();

  Trace trace;
  trace.push_back({0.0, 0.0, 0.0, 0.0, "bootstrap", -1});
  trace.push_back({1.0, 5.0, 0.41, 10.5 * kPi / 180.0, "done", 1});
  const TrialMetrics fwd = compute_metrics(teach, trace, Direction::forward);
  CHECK(fwd.start_distance == doctest::Approx(0.0));
  CHECK(fwd.start_angle_diff == doctest::Approx(0.0));
  CHECK(fwd.end_distance == doctest::Approx(0.41));
  CHECK(fwd.end_angle_diff == doctest::Approx(10.5));

  // 350-degree raw difference reports as 10
  Trace wrapped = trace;
  wrapped.back().heading = -10.0 * kPi / 180.0;
  const TrialMetrics wrap = compute_metrics(teach, wrapped, Direction::forward);
  CHECK(wrap.end_angle_diff == doctest::Approx(10.0));

  // backward runs anchor the end metric at the first keyframe
  Trace back;
  back.push_back({0.0, 4.0, 1.0, 0.0, "bootstrap", -1});
  back.push_back({1.0, 0.2, 0.0, 0.0, "done", 0});
  const TrialMetrics bwd = compute_metrics(teach, back, Direction::backward);
  CHECK(bwd.end_distance == doctest::Approx(0.2));
  CHECK(bwd.start_distance == doctest::Approx(std::hypot(4.0, 1.0)));
}

TEST_CASE("summarize: single trial and empty batch") {
  TrialReport r;
  r.completed = true;
  r.start_distance = 2.0;
  r.end_distance = 0.3;
  r.start_angle_diff = 90.0;
  r.end_angle_diff = 5.0;
  const BatchSummary one = summarize({r});
  CHECK(one.completed == 1);
  CHECK(one.start_distance.mean == 2.0);
  CHECK(one.start_distance.stddev == 0.0);
  CHECK(one.end_angle_diff.mean == 5.0);

  TrialReport failed;
  failed.completed = false;
  const BatchSummary none = summarize({failed, failed});
  CHECK(none.total == 2);
  CHECK(none.completed == 0);
  const std::string json = summary_to_json(none, Direction::forward);
  CHECK(json.find("null") != std::string::npos);
}

TEST_CASE("summary recomputed from the per-trial CSV matches exactly") {
  std::vector<TrialReport> reports;
  for (int i = 0; i < 6; ++i) {
    TrialReport r;
    r.trial_id = i;
    r.completed = i != 3;  // one failure excluded from stats
    r.start_distance = 1.0 + 0.37 * i;
    r.end_distance = 0.2 + 0.11 * i;
    r.start_angle_diff = 10.0 * i;
    r.end_angle_diff = 2.0 + i;
    r.pair_i = "a";
    r.pair_j = "b";
    reports.push_back(r);
  }
  const BatchSummary summary = summarize(reports);
  const std::string csv = reports_to_csv(reports);

  // re-parse the CSV and recompute
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> start_d, end_d, start_a, end_a;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 11);
    if (cells[6] != "1") continue;
    start_d.push_back(std::stod(cells[2]));
    end_d.push_back(std::stod(cells[3]));
    start_a.push_back(std::stod(cells[4]));
    end_a.push_back(std::stod(cells[5]));
  }
  REQUIRE(start_d.size() == 5);
  const auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  CHECK(mean(start_d) == summary.start_distance.mean);
  CHECK(mean(end_d) == summary.end_distance.mean);
  CHECK(mean(start_a) == summary.start_angle_diff.mean);
  CHECK(mean(end_a) == summary.end_angle_diff.mean);
}

TEST_CASE("teach then repeat end to end at unit scale") {
  const WorldSpec world = small_world();
  EvalConfig cfg;
  const TeachResult teach = run_teach(world, {0, 0, 0, 0, "world"}, 1, cfg);
  CHECK(teach.map.keyframes.size() >= 2);
  CHECK(teach.map.keyframes[0].x == 0.0);
  CHECK(unique_landmarks(teach.map).size() >= 3);

  const TrialOutcome outcome = run_repeat_trial(
      world, teach.map, {0, 0, 0, 0, "world"}, Direction::forward, 5, cfg, 0);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.completed);
  CHECK(outcome.report.end_distance < 0.2);
  CHECK(outcome.trace.front().phase == "bootstrap");
}

TEST_CASE("cmd exit codes: schema, landmark floor, relocalization failure") {
  const fs::path world_path = temp_path("world.json");
  const fs::path map_path = temp_path("map.json");
  const fs::path trace_path = temp_path("trace.csv");
  std::ostringstream out, err;
  EvalConfig cfg;

  {
    std::ofstream f(world_path);
    f << R"({"objects":"oops"})";
  }
  CHECK(cmd_teach(world_path.string(), parse_start_pose("0,0,0"),
                  map_path.string(), 1, cfg, out, err) == 2);
  CHECK(err.str().find("objects") != std::string::npos);

  WorldSpec empty_world = small_world();
  empty_world.objects.clear();
  save_world(empty_world, world_path);
  CHECK(cmd_teach(world_path.string(), parse_start_pose("0,0,0"),
                  map_path.string(), 1, cfg, out, err) == 3);

  WorldSpec two = small_world();
  two.objects.resize(2);
  save_world(two, world_path);
  CHECK(cmd_teach(world_path.string(), parse_start_pose("0,0,0"),
                  map_path.string(), 1, cfg, out, err) == 3);
  CHECK(cmd_repeat(world_path.string(), map_path.string(),
                   parse_start_pose("0,1,0"), Direction::forward,
                   trace_path.string(), 2, cfg, out, err) == 4);

  fs::remove(world_path);
  fs::remove(map_path);
  fs::remove(trace_path);
}

TEST_CASE("cmd_repeat: happy path writes a trace and a report") {
  const fs::path world_path = temp_path("good_world.json");
  const fs::path map_path = temp_path("good_map.json");
  const fs::path trace_path = temp_path("good_trace.csv");
  std::ostringstream out, err;
  EvalConfig cfg;

  save_world(small_world(), world_path);
  REQUIRE(cmd_teach(world_path.string(), parse_start_pose("0,0,0"),
                    map_path.string(), 1, cfg, out, err) == 0);
  CHECK(out.str().find("landmarks:") != std::string::npos);

  out.str("");
  CHECK(cmd_repeat(world_path.string(), map_path.string(),
                   parse_start_pose("0.5,0.5,45"), Direction::forward,
                   trace_path.string(), 3, cfg, out, err) == 0);
  CHECK(out.str().find("\"completed\": true") != std::string::npos);

  std::ifstream trace(trace_path);
  std::string header;
  std::getline(trace, header);
  CHECK(header == "t,x,y,heading,phase,goal_index");

  fs::remove(world_path);
  fs::remove(map_path);
  fs::remove(trace_path);
}

TEST_CASE("cmd_perturb: empty moves keep objects identical, unknown label fails") {
  const fs::path world_path = temp_path("perturb_world.json");
  const fs::path moves_path = temp_path("moves.json");
  const fs::path out_path = temp_path("perturbed.json");
  std::ostringstream out, err;

  save_world(small_world(), world_path);
  {
    std::ofstream f(moves_path);
    f << "[]";
  }
  CHECK(cmd_perturb(world_path.string(), moves_path.string(), out_path.string(),
                    out, err) == 0);
  const WorldSpec before = load_world(world_path);
  const WorldSpec after = load_world(out_path);
  REQUIRE(before.objects.size() == after.objects.size());
  for (size_t i = 0; i < before.objects.size(); ++i) {
    CHECK(before.objects[i].position.x == after.objects[i].position.x);
    CHECK(before.objects[i].position.y == after.objects[i].position.y);
  }

  {
    std::ofstream f(moves_path);
    f << R"([{"label":"unicorn","pos":[0,0,0]}])";
  }
  CHECK(cmd_perturb(world_path.string(), moves_path.string(), out_path.string(),
                    out, err) == 2);

  fs::remove(world_path);
  fs::remove(moves_path);
  fs::remove(out_path);
}

TEST_CASE("cmd_eval: writes per-trial CSV and summary JSON") {
  const fs::path world_path = temp_path("eval_world.json");
  const fs::path map_path = temp_path("eval_map.json");
  const fs::path starts_path = temp_path("eval_starts.json");
  const fs::path csv_path = temp_path("eval_trials.csv");
  std::ostringstream out, err;
  EvalConfig cfg;

  save_world(small_world(), world_path);
  REQUIRE(cmd_teach(world_path.string(), parse_start_pose("0,0,0"),
                    map_path.string(), 1, cfg, out, err) == 0);
  {
    std::ofstream f(starts_path);
    f << "[[0,1,30],[2,-1,170]]";
  }
  CHECK(cmd_eval(world_path.string(), map_path.string(), starts_path.string(),
                 Direction::forward, csv_path.string(), 9, cfg, out, err) == 0);
  CHECK(fs::exists(csv_path));
  fs::path summary_path = csv_path;
  summary_path.replace_extension(".summary.json");
  CHECK(fs::exists(summary_path));
  CHECK(out.str().find("\"completed\": 2") != std::string::npos);

  // a batch where every trial fails bootstrap still reports per-trial rows
  {
    std::ofstream f(starts_path);
    f << "[[40,40,0]]";  // far outside sensing range of anything
  }
  out.str("");
  CHECK(cmd_eval(world_path.string(), map_path.string(), starts_path.string(),
                 Direction::forward, csv_path.string(), 9, cfg, out, err) == 0);
  CHECK(out.str().find("\"completed\": 0") != std::string::npos);
  CHECK(out.str().find("null") != std::string::npos);

  // a teach map without the ground-truth anchor meta is a schema error
  SemanticMap bare;
  bare.map_id = "teach";
  bare.keyframes.push_back({0, 0, 0, 0, "teach"});
  bare.keyframes.push_back({1, 0, 0, 0, "teach"});
  save_map(bare, map_path);
  {
    std::ofstream f(starts_path);
    f << "[[0,1,30]]";
  }
  CHECK(cmd_eval(world_path.string(), map_path.string(), starts_path.string(),
                 Direction::forward, csv_path.string(), 9, cfg, out, err) == 2);

  fs::remove(world_path);
  fs::remove(map_path);
  fs::remove(starts_path);
  fs::remove(csv_path);
  fs::remove(summary_path);
}

TEST_CASE("repeat still works after relocating objects between phases") {
  // Teach in the original world, then repeat in a world where some of the
  // unique objects moved; the trimmed pair search must route around them.
  WorldSpec world = small_world();
  world.objects.push_back({"mug", {3.8, 3.2, 0.5}, 0.15});
  world.objects.push_back({"lamp", {3.8, -3.2, 1.2}, 0.15});
  EvalConfig cfg;
  const TeachResult teach = run_teach(world, {0, 0, 0, 0, "world"}, 1, cfg);
  REQUIRE(unique_landmarks(teach.map).size() == 7);

  const std::vector<std::pair<std::string, Vec3>> moves = {
      {"clock", {6.0, 3.0, 0.9}},
      {"tv", {-2.0, -3.0, 0.8}},
  };
  const WorldSpec changed = perturb_objects(world, moves);

  const TrialOutcome outcome = run_repeat_trial(
      changed, teach.map, {0.5, 1.0, 0, kPi / 2.0, "world"}, Direction::forward,
      21, cfg, 0);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.completed);
  CHECK(outcome.report.end_distance < 0.3);
  REQUIRE(outcome.relocalization.has_value());
  // the moved labels must not be the anchors of the chosen pair
  CHECK(outcome.report.pair_i != "clock");
  CHECK(outcome.report.pair_j != "clock");
  CHECK(outcome.report.pair_i != "tv");
  CHECK(outcome.report.pair_j != "tv");
}

TEST_CASE("batch determinism: same seed, byte-identical CSV") {
  const WorldSpec world = small_world();
  EvalConfig cfg;
  const TeachResult teach = run_teach(world, {0, 0, 0, 0, "world"}, 1, cfg);
  const std::vector<Pose> starts = {parse_start_pose("0,1,30"),
                                    parse_start_pose("2,-1,170")};

  const BatchResult a = run_eval_batch(world, teach.map, starts,
                                       Direction::forward, 11, cfg);
  const BatchResult b = run_eval_batch(world, teach.map, starts,
                                       Direction::forward, 11, cfg);
  CHECK(reports_to_csv(a.reports) == reports_to_csv(b.reports));
  CHECK(a.summary.completed == starts.size());
}

TEST_CASE("load_config overrides defaults") {
  const fs::path path = temp_path("config.json");
  {
    std::ofstream f(path);
    f << R"({"pixel_radius": 15, "goal_tolerance": 0.1,)"
      << R"( "heading_deadband_deg": 10, "step_budget": 500})";
  }
  const EvalConfig cfg = load_config(path);
  CHECK(cfg.map.pixel_radius == 15.0);
  CHECK(cfg.goal_tolerance == 0.1);
  CHECK(cfg.heading_deadband == doctest::Approx(10.0 * kPi / 180.0));
  CHECK(cfg.step_budget == 500);
  CHECK(cfg.map.min_features == 3);  // untouched default
  fs::remove(path);
}

TEST_SUITE_END();
