// Copyright 2026 The Vessel Eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded generator of GT scenes, perturbed predictions, and the panoptic and
// relation counters an evaluation of the pair must produce.
//
// Vessels are rectangles or ellipses laid out one per grid cell, so vessels
// do not overlap unless the plan asks for it. Materials are horizontal bands
// of a vessel below an empty top region, where parts sit. Every instance
// covers at most one run of pixels per row, which lets the expected IOUs be
// computed from row extents alone.
//
// Each prediction is derived from one GT instance, or is spurious. After
// perturbation the generator enforces that no prediction has IOU > 0.5 with
// any GT instance other than its source: a perturbation breaking this is
// reverted, and a spurious segment breaking it is discarded. The expected
// counters then follow from the planned pairs without running a matcher.

#ifndef VESSEL_EVAL_SYNTHETIC_H_
#define VESSEL_EVAL_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/metrics.h"
#include "vessel_eval/scene.h"

namespace vessel_eval {

struct CountRange {
  int min = 0;
  int max = 0;
};

// Perturbations applied to the predictions of one instance kind.
struct PerturbSpec {
  // Prediction omitted: a false negative.
  double drop = 0.0;
  // An extra prediction of this kind per GT instance: a false positive.
  double spurious = 0.0;
  // Leaf class replaced by another of the same kind.
  double flip = 0.0;
  // Largest grow (positive) or shrink (negative) step in pixels; each
  // prediction draws a step uniformly from [-morph, morph].
  int morph = 0;
};

struct SyntheticPlan {
  int scenes = 10;
  int64_t width = 256;
  int64_t height = 256;
  uint64_t seed = 1;
  CountRange vessels{1, 4};
  // Per vessel.
  CountRange materials{1, 3};
  CountRange parts{0, 1};
  // Vessels extend past their grid cells into their neighbours.
  bool overlap = false;
  // The first vessel of every scene is a tube whose only content is a
  // pipette holding blood.
  bool nested = false;
  // Probability that a pair of vessels is linked.
  double link = 0.3;
  // Per linked pair: omitted from the prediction.
  double link_drop = 0.0;
  // Per unlinked pair: linked in the prediction only.
  double link_spurious = 0.0;
  PerturbSpec vessel;
  PerturbSpec material;
  PerturbSpec part;
};

absl::Status ValidatePlan(const SyntheticPlan& plan);

// Plan document: an object whose fields mirror SyntheticPlan (ranges as
// [min, max] arrays, perturbations under "perturb" keyed by kind). Omitted
// fields keep their defaults; unknown fields are errors.
absl::StatusOr<SyntheticPlan> ParsePlan(std::string_view document);

// Counters an evaluation of the generated pair must reproduce (scene scope).
struct ExpectedCounters {
  int64_t scene_count = 0;
  // Keyed by pool name; only with_class and class_agnostic are filled.
  std::map<std::string, PoolReport> pools;
  std::map<std::string, RelationCounts> relations;
  int64_t unmapped_pred_relations = 0;

  friend bool operator==(const ExpectedCounters&,
                         const ExpectedCounters&) = default;
};

std::string SerializeExpected(const ExpectedCounters& expected);
absl::StatusOr<ExpectedCounters> ParseExpected(std::string_view document);

struct SyntheticScene {
  // Document file name, e.g. "scene_0007.json".
  std::string name;
  SceneAnnotation gt;
  SceneAnnotation pred;
};

struct SyntheticDataset {
  std::vector<SyntheticScene> scenes;
  ExpectedCounters expected;
};

// Deterministic for a given plan: equal plans give identical datasets.
absl::StatusOr<SyntheticDataset> GenerateSynthetic(const SyntheticPlan& plan);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_SYNTHETIC_H_
