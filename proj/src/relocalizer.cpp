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

#include "vtr/relocalizer.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "vtr/errors.hpp"

namespace vtr {

namespace {

// label -> position for labels appearing exactly once among the unique-flagged
// landmarks of a map.
std::map<std::string, Vec3> unique_positions(const SemanticMap& map) {
  std::map<std::string, Vec3> out;
  for (const Landmark& lm : map.landmarks) {
    if (lm.unique) out.emplace(lm.label, lm.position);
  }
  return out;
}

}  // namespace

size_t trimmed_count(size_t n_common) {
  return std::max<size_t>(3, (n_common + 1) / 2);
}

std::vector<CommonLandmark> common_unique_landmarks(const SemanticMap& teach,
                                                    const SemanticMap& repeat) {
  const auto teach_unique = unique_positions(teach);
  const auto repeat_unique = unique_positions(repeat);
  std::vector<CommonLandmark> out;
  for (const auto& [label, teach_pos] : teach_unique) {
    auto it = repeat_unique.find(label);
    if (it != repeat_unique.end()) {
      out.push_back({label, teach_pos, it->second});
    }
  }
  return out;  // std::map iteration keeps labels sorted
}

CandidatePair make_candidate_pair(const CommonLandmark& i, const CommonLandmark& j) {
  CandidatePair pair;
  pair.label_i = i.label;
  pair.label_j = j.label;
  pair.teach_frame = build_pair_frame(i.teach_position, j.teach_position);
  pair.repeat_frame = build_pair_frame(i.repeat_position, j.repeat_position);
  pair.scale = distance(i.teach_position, j.teach_position) /
               distance(i.repeat_position, j.repeat_position);
  return pair;
}

std::pair<double, std::vector<double>> candidate_error(
    const CandidatePair& pair, std::span<const CommonLandmark> common, size_t h) {
  if (common.size() < 3) {
    throw InsufficientLandmarks("candidate_error requires at least 3 common landmarks");
  }
  if (h > common.size()) {
    throw std::invalid_argument("h exceeds the number of common landmarks");
  }
  const PlanarTransform teach_to_pair = map_to_pair_transform(pair.teach_frame);
  const PlanarTransform repeat_to_pair = map_to_pair_transform(pair.repeat_frame);

  std::vector<double> residuals;
  residuals.reserve(common.size());
  for (const CommonLandmark& lm : common) {
    const Vec3 t = apply_point(teach_to_pair, lm.teach_position);
    const Vec3 r = apply_point(repeat_to_pair, lm.repeat_position);
    const Vec3 d = t - pair.scale * r;
    residuals.push_back(dot(d, d));
  }

  std::vector<double> sorted = residuals;
  std::nth_element(sorted.begin(), sorted.begin() + (h - 1), sorted.end());
  double gamma = 0.0;
  for (size_t k = 0; k < h; ++k) gamma += sorted[k];
  return {gamma, residuals};
}

PlanarTransform compose_relocalization(const CandidatePair& pair) {
  PlanarTransform repeat_to_pair = map_to_pair_transform(pair.repeat_frame);
  // Express the repeat map at teach scale before leaving the pair frame;
  // scaling the transform's translation is equivalent to scaling its inputs.
  repeat_to_pair.dx *= pair.scale;
  repeat_to_pair.dy *= pair.scale;
  return compose(invert(map_to_pair_transform(pair.teach_frame)), repeat_to_pair);
}

RelocalizationResult find_best_pair(const SemanticMap& teach,
                                    const SemanticMap& repeat) {
  const std::vector<CommonLandmark> common = common_unique_landmarks(teach, repeat);
  const size_t n = common.size();
  if (n < 3) {
    throw InsufficientLandmarks("relocalization needs at least 3 common unique objects, got " +
                                std::to_string(n));
  }
  const size_t h = trimmed_count(n);

  bool found = false;
  double best_gamma = 0.0;
  CandidatePair best_pair;
  std::vector<double> best_residuals;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      CandidatePair pair;
      try {
        pair = make_candidate_pair(common[i], common[j]);
      } catch (const DegeneratePair&) {
        continue;
      }
      auto [gamma, residuals] = candidate_error(pair, common, h);
      // Strict < keeps the first (lexicographically smallest) pair on ties.
      if (!found || gamma < best_gamma) {
        found = true;
        best_gamma = gamma;
        best_pair = std::move(pair);
        best_residuals = std::move(residuals);
      }
    }
  }
  if (!found) throw NoValidPair("all candidate object pairs are degenerate");

  RelocalizationResult result;
  result.label_i = best_pair.label_i;
  result.label_j = best_pair.label_j;
  result.scale = best_pair.scale;
  result.transform = compose_relocalization(best_pair);
  result.gamma = best_gamma;
  result.residuals.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    result.residuals.push_back({common[k].label, best_residuals[k]});
  }
  result.used_count = h;
  result.teach_map_id = teach.map_id;
  result.repeat_map_id = repeat.map_id;
  return result;
}

Pose relocalize_pose(const RelocalizationResult& result, const Pose& repeat_pose) {
  if (repeat_pose.frame_id != result.repeat_map_id) {
    throw FrameMismatch("pose frame '" + repeat_pose.frame_id +
                        "' is not the repeat map '" + result.repeat_map_id + "'");
  }
  const Vec3 scaled = result.scale * repeat_pose.position();
  const Vec3 mapped = apply_point(result.transform, scaled);
  return {mapped.x, mapped.y, mapped.z,
          wrap_angle(repeat_pose.heading + result.transform.alpha),
          result.teach_map_id};
}

}  // namespace vtr
