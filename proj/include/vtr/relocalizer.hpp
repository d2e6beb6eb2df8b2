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
#include <string>
#include <utility>
#include <vector>

#include "vtr/geometry.hpp"
#include "vtr/semantic_map.hpp"

namespace vtr {

/// A label present (and unique) in both maps, with its position in each.
struct CommonLandmark {
  std::string label;
  Vec3 teach_position;
  Vec3 repeat_position;
};

/// One enumerated object pair: the pair frames it induces in both maps and
/// the relative scale, the ratio of the pair's 3D distances (teach/repeat).
struct CandidatePair {
  std::string label_i;  ///< lexicographically smaller label
  std::string label_j;
  PairFrame teach_frame;
  PairFrame repeat_frame;
  double scale = 1.0;
};

struct LabelResidual {
  std::string label;
  double value = 0.0;  ///< squared pair-frame position error, map-units^2
};

/// Output of the pair search: the winning pair, the recovered similarity
/// (scale s*, rotation/translation in `transform`), the trimmed aggregated
/// error gamma, and the per-label residuals under the winning alignment.
struct RelocalizationResult {
  std::string label_i;
  std::string label_j;
  double scale = 1.0;
  PlanarTransform transform;  ///< delta-theta, delta-x, delta-y
  double gamma = 0.0;
  std::vector<LabelResidual> residuals;  ///< label-sorted, one per common landmark
  size_t used_count = 0;                 ///< h, number of residuals summed into gamma
  std::string teach_map_id;
  std::string repeat_map_id;
};

/// Labels unique in both maps and present in both, label-sorted.
std::vector<CommonLandmark> common_unique_landmarks(const SemanticMap& teach,
                                                    const SemanticMap& repeat);

/// Builds the candidate for two common landmarks (label order `i` < `j`).
/// Throws DegeneratePair when either map's pair frame is degenerate.
CandidatePair make_candidate_pair(const CommonLandmark& i, const CommonLandmark& j);

/// Trimmed aggregated error of one candidate alignment: residual_k is the
/// squared distance between object k's teach pair-frame coordinates and its
/// scale-corrected repeat pair-frame coordinates; gamma sums the h smallest.
/// Residuals are returned in `common` order.
std::pair<double, std::vector<double>> candidate_error(
    const CandidatePair& pair, std::span<const CommonLandmark> common, size_t h);

/// The repeat-map -> teach-map transform induced by a candidate pair, with
/// the pair's scale folded in so that a repeat position scaled by s and then
/// transformed lands on its teach counterpart. Its translation is therefore
/// the actual (delta-x, delta-y) of the teach<-repeat similarity.
PlanarTransform compose_relocalization(const CandidatePair& pair);

/// Enumerates all label pairs over the common unique landmarks, skipping
/// degenerate ones, and returns the pair minimizing gamma with
/// h = max(3, ceil(N/2)). Ties resolve to the lexicographically smallest
/// (label_i, label_j). Throws InsufficientLandmarks when N < 3 and
/// NoValidPair when every pair is degenerate.
RelocalizationResult find_best_pair(const SemanticMap& teach,
                                    const SemanticMap& repeat);

/// Maps a repeat-map pose into the teach map: position is scaled by s*
/// (all three coordinates) and then rigidly transformed; heading is shifted
/// by delta-theta. Throws FrameMismatch unless the pose belongs to the
/// repeat map.
Pose relocalize_pose(const RelocalizationResult& result, const Pose& repeat_pose);

/// The trim count used for N common landmarks: max(3, ceil(N/2)).
size_t trimmed_count(size_t n_common);

}  // namespace vtr
