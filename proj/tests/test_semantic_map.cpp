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

#include "vtr/semantic_map.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "test_util.hpp"
#include "vtr/errors.hpp"

using namespace vtr;
using vtr::testing::uniform;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / (std::string("vtr_test_") + name);
}

/// Filter-then-mean oracle, written directly against the contract.
std::optional<Vec3> oracle_estimate(const Detection& det,
                                    const std::vector<FeaturePoint>& features,
                                    double radius, int min_features) {
  const double cu = (det.u_min + det.u_max) / 2.0;
  const double cv = det.v_min;
  std::vector<Vec3> chosen;
  for (const FeaturePoint& f : features) {
    if (std::hypot(f.pixel.x - cu, f.pixel.y - cv) <= radius) {
      chosen.push_back(f.position);
    }
  }
  if (static_cast<int>(chosen.size()) < min_features) return std::nullopt;
  Vec3 sum;
  for (const Vec3& p : chosen) sum = sum + p;
  return (1.0 / chosen.size()) * sum;
}

}  // namespace

TEST_SUITE_BEGIN("semantic_map");

TEST_CASE("estimate_object_position: mean of qualifying features") {
  const Detection det{"clock", 80, 40, 120, 200, 0};  // upper-middle (100, 40)
  const std::vector<FeaturePoint> features = {
      {{95, 45}, {1.0, 2.0, 0.5}},
      {{105, 38}, {1.2, 2.2, 0.5}},
  };
  const auto est = estimate_object_position(det, features, 20.0, 1);
  REQUIRE(est.has_value());
  CHECK(est->x == doctest::Approx(1.1));
  CHECK(est->y == doctest::Approx(2.1));
  CHECK(est->z == doctest::Approx(0.5));
}

TEST_CASE("estimate_object_position: none without nearby features") {
  const Detection det{"clock", 80, 40, 120, 200, 0};
  const std::vector<FeaturePoint> features = {{{400, 300}, {1, 1, 1}}};
  CHECK_FALSE(estimate_object_position(det, features, 20.0, 1).has_value());
  CHECK_FALSE(estimate_object_position(det, {}, 20.0, 1).has_value());
}

TEST_CASE("estimate_object_position: radius picks exactly the close ones") {
  const Detection det{"tv", 100, 100, 300, 260, 0};  // upper-middle (200, 100)
  const std::vector<FeaturePoint> features = {
      {{205, 102}, {1, 0, 0}}, {{190, 95}, {2, 0, 0}},  {{210, 110}, {3, 0, 0}},
      {{260, 100}, {9, 9, 9}}, {{200, 170}, {8, 8, 8}},
  };
  const auto est = estimate_object_position(det, features, 20.0, 1);
  REQUIRE(est.has_value());
  CHECK(est->x == doctest::Approx(2.0));
  CHECK(est->y == doctest::Approx(0.0));
}

TEST_CASE("estimate_object_position equals the brute-force oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    Detection det;
    det.label = "x";
    det.u_min = uniform(rng, 0, 300);
    det.u_max = det.u_min + uniform(rng, 10, 200);
    det.v_min = uniform(rng, 0, 200);
    det.v_max = det.v_min + uniform(rng, 10, 200);
    std::vector<FeaturePoint> features;
    const int n = static_cast<int>(uniform(rng, 0, 12));
    for (int i = 0; i < n; ++i) {
      features.push_back({{uniform(rng, 0, 640), uniform(rng, 0, 480)},
                          {uniform(rng, -5, 5), uniform(rng, -5, 5),
                           uniform(rng, 0, 2)}});
    }
    const double radius = uniform(rng, 5, 60);
    const int min_features = 1 + static_cast<int>(uniform(rng, 0, 4));
    const auto got = estimate_object_position(det, features, radius, min_features);
    const auto want = oracle_estimate(det, features, radius, min_features);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->x == want->x);  // exact: same accumulation order
      CHECK(got->y == want->y);
      CHECK(got->z == want->z);
    }
  }
}

TEST_CASE("reject_partial") {
  CHECK(reject_partial({"a", 5, 100, 200, 300, 0}, 640, 480, 10.0));
  CHECK_FALSE(reject_partial({"a", 50, 50, 600, 400, 0}, 640, 480, 10.0));
  CHECK(reject_partial({"a", 50, 50, 635, 400, 0}, 640, 480, 10.0));
  CHECK(reject_partial({"a", 50, 5, 600, 400, 0}, 640, 480, 10.0));
  CHECK(reject_partial({"a", 50, 50, 600, 475, 0}, 640, 480, 10.0));
}

TEST_CASE("insert_landmark: dedup and uniqueness flags") {
  SemanticMap map;
  map.map_id = "m";

  CHECK(insert_landmark(map, "clock", {1, 1, 0}, 0.5) == InsertOutcome::inserted);
  REQUIRE(map.landmarks.size() == 1);
  CHECK(map.landmarks[0].instance == 0);
  CHECK(map.landmarks[0].unique);

  CHECK(insert_landmark(map, "clock", {1.05, 1, 0}, 0.5) == InsertOutcome::merged);
  CHECK(map.landmarks.size() == 1);
  // merged keeps the original position
  CHECK(map.landmarks[0].position.x == 1.0);

  CHECK(insert_landmark(map, "clock", {3, 1, 0}, 0.5) == InsertOutcome::inserted);
  REQUIRE(map.landmarks.size() == 2);
  CHECK(map.landmarks[1].instance == 1);
  CHECK_FALSE(map.landmarks[0].unique);
  CHECK_FALSE(map.landmarks[1].unique);
}

TEST_CASE("insert_landmark: random streams keep same-label spacing") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    SemanticMap map;
    map.map_id = "m";
    const double threshold = uniform(rng, 0.2, 1.0);
    const char* labels[] = {"chair", "tv", "plant"};
    for (int i = 0; i < 60; ++i) {
      const char* label = labels[static_cast<size_t>(uniform(rng, 0, 3))];
      insert_landmark(map, label,
                      {uniform(rng, -4, 4), uniform(rng, -4, 4), 0.0}, threshold);
    }
    for (size_t a = 0; a < map.landmarks.size(); ++a) {
      for (size_t b = a + 1; b < map.landmarks.size(); ++b) {
        if (map.landmarks[a].label != map.landmarks[b].label) continue;
        CHECK(distance(map.landmarks[a].position, map.landmarks[b].position) >=
              threshold);
      }
    }
    // unique landmarks + duplicates partition the list
    size_t unique_count = unique_landmarks(map).size();
    size_t dup_count = 0;
    for (const Landmark& lm : map.landmarks) {
      if (!lm.unique) ++dup_count;
    }
    CHECK(unique_count + dup_count == map.landmarks.size());
  }
}

TEST_CASE("unique_landmarks") {
  SemanticMap map;
  map.map_id = "m";
  insert_landmark(map, "clock", {0, 0, 0}, 0.5);
  insert_landmark(map, "monitor", {2, 0, 0}, 0.5);
  insert_landmark(map, "chair", {4, 0, 0}, 0.5);
  insert_landmark(map, "chair", {8, 0, 0}, 0.5);

  const auto unique = unique_landmarks(map);
  REQUIRE(unique.size() == 2);
  CHECK(unique[0].label == "clock");
  CHECK(unique[1].label == "monitor");

  SemanticMap all_same;
  all_same.map_id = "m";
  insert_landmark(all_same, "chair", {0, 0, 0}, 0.5);
  insert_landmark(all_same, "chair", {2, 0, 0}, 0.5);
  insert_landmark(all_same, "chair", {4, 0, 0}, 0.5);
  CHECK(unique_landmarks(all_same).empty());
}

TEST_CASE("record_keyframe: spacing gate and frame check") {
  SemanticMap map;
  map.map_id = "m";
  CHECK(record_keyframe(map, {0, 0, 0, 0, "m"}, 0.1) == KeyframeOutcome::appended);
  CHECK(record_keyframe(map, {0.01, 0, 0, 0, "m"}, 0.1) == KeyframeOutcome::skipped);
  CHECK(record_keyframe(map, {0.3, 0, 0, 0, "m"}, 0.1) == KeyframeOutcome::appended);
  CHECK(map.keyframes.size() == 2);
  CHECK_THROWS_AS(record_keyframe(map, {1, 1, 0, 0, "other"}, 0.1), FrameMismatch);
}

TEST_CASE("save/load round trip") {
  SemanticMap map;
  map.map_id = "teach";
  map.meta["seed"] = "42";
  map.meta["scale"] = "1.2576584930";
  insert_landmark(map, "clock", {1.25, -0.5, 0.75}, 0.5);
  insert_landmark(map, "tv", {0.1, 2.25, 1.0}, 0.5);
  insert_landmark(map, "chair", {3.000000001, 0, 0.4}, 0.5);
  for (int i = 0; i < 5; ++i) {
    record_keyframe(map, {0.3 * i, 0.1 * i, 0.0, 0.05 * i, "teach"}, 0.01);
  }

  const auto path = temp_file("roundtrip.json");
  save_map(map, path);
  const SemanticMap loaded = load_map(path);
  CHECK(loaded.map_id == map.map_id);
  CHECK(loaded.meta == map.meta);
  REQUIRE(loaded.landmarks.size() == map.landmarks.size());
  for (size_t i = 0; i < map.landmarks.size(); ++i) {
    CHECK(loaded.landmarks[i].label == map.landmarks[i].label);
    CHECK(loaded.landmarks[i].instance == map.landmarks[i].instance);
    CHECK(loaded.landmarks[i].unique == map.landmarks[i].unique);
    CHECK(loaded.landmarks[i].position.x == map.landmarks[i].position.x);
    CHECK(loaded.landmarks[i].position.y == map.landmarks[i].position.y);
    CHECK(loaded.landmarks[i].position.z == map.landmarks[i].position.z);
  }
  REQUIRE(loaded.keyframes.size() == map.keyframes.size());
  for (size_t i = 0; i < map.keyframes.size(); ++i) {
    CHECK(loaded.keyframes[i].x == map.keyframes[i].x);
    CHECK(loaded.keyframes[i].heading == map.keyframes[i].heading);
    CHECK(loaded.keyframes[i].frame_id == "teach");
  }
  fs::remove(path);
}

TEST_CASE("save/load round trip on random maps") {
  std::mt19937_64 rng(29);
  const auto path = temp_file("roundtrip_random.json");
  for (int trial = 0; trial < 20; ++trial) {
    SemanticMap map = vtr::testing::random_teach_map(rng, 6);
    for (int i = 0; i < 4; ++i) {
      record_keyframe(map,
                      {uniform(rng, -5, 5), uniform(rng, -5, 5), 0.0,
                       uniform(rng, -3, 3), map.map_id},
                      0.0);
    }
    save_map(map, path);
    const SemanticMap loaded = load_map(path);
    REQUIRE(loaded.landmarks.size() == map.landmarks.size());
    for (size_t i = 0; i < map.landmarks.size(); ++i) {
      CHECK(loaded.landmarks[i].position.x == map.landmarks[i].position.x);
      CHECK(loaded.landmarks[i].position.y == map.landmarks[i].position.y);
      CHECK(loaded.landmarks[i].position.z == map.landmarks[i].position.z);
    }
    REQUIRE(loaded.keyframes.size() == map.keyframes.size());
    for (size_t i = 0; i < map.keyframes.size(); ++i) {
      CHECK(loaded.keyframes[i].heading == map.keyframes[i].heading);
    }
  }
  fs::remove(path);
}

TEST_CASE("load_map: schema errors carry the field path") {
  const auto path = temp_file("bad_map.json");

  {
    std::ofstream out(path);
    out << R"({"schema_version":1,"map_id":"m","meta":{},"landmarks":[]})";
  }
  try {
    load_map(path);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.field() == "keyframes");
  }

  {
    std::ofstream out(path);
    out << R"({"map_id":"m","meta":{},"landmarks":[{"label":"a","instance":0,)"
        << R"("pos":[1,2],"unique":true}],"keyframes":[]})";
  }
  try {
    load_map(path);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.field() == "landmarks[0].pos");
  }

  {
    std::ofstream out(path);
    out << "not json";
  }
  CHECK_THROWS_AS(load_map(path), SchemaError);
  fs::remove(path);

  CHECK_THROWS_AS(load_map(temp_file("does_not_exist.json")), IoError);
}

TEST_CASE("load_map ignores unknown extra fields") {
  const auto path = temp_file("extra_fields.json");
  {
    std::ofstream out(path);
    out << R"({"schema_version":1,"map_id":"m","meta":{},"future_field":[1,2,3],)"
        << R"("landmarks":[{"label":"a","instance":0,"pos":[1,2,3],)"
        << R"("unique":true,"color":"red"}],"keyframes":[]})";
  }
  const SemanticMap map = load_map(path);
  CHECK(map.map_id == "m");
  REQUIRE(map.landmarks.size() == 1);
  CHECK(map.landmarks[0].position.z == 3.0);
  fs::remove(path);
}

TEST_CASE("MapBuilder wires rejection, estimation, and dedup together") {
  MapBuildConfig cfg;
  MapBuilder builder("run", cfg, 640, 480);

  const Detection good{"clock", 200, 100, 260, 200, 0};  // upper-middle (230, 100)
  const Detection partial{"tv", 2, 100, 200, 200, 0};
  const std::vector<FeaturePoint> features = {
      {{228, 102}, {1.0, 1.0, 0.5}},
      {{231, 99}, {1.0, 1.0, 0.5}},
      {{230, 101}, {1.0, 1.0, 0.5}},
  };
  builder.ingest(std::vector<Detection>{good, partial}, features,
                 {0, 0, 0, 0, "run"});
  CHECK(builder.map().landmarks.size() == 1);
  CHECK(builder.map().landmarks[0].label == "clock");
  CHECK(builder.map().keyframes.size() == 1);
  CHECK(builder.unique_count() == 1);
}

TEST_SUITE_END();
