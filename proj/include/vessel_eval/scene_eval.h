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

// Scene-level evaluation: one GT/prediction pair in, one MetricReport out.
//
// Scene scope: semantic maps built from every instance, and one panoptic
// table per instance kind (vessel, material, part).
//
// Content scope: for each GT vessel, its direct material and part content is
// compared with the direct content of the predicted vessel it matches
// (class-agnostic vessel matching). An unmatched GT vessel is compared with
// empty content. Per-vessel values feed macro averages; counters are summed.
//
// Relations: scored over GT vessels. A predicted vessel relation counts only
// when both endpoints match GT vessels; others are tallied as unmapped.

#ifndef VESSEL_EVAL_SCENE_EVAL_H_
#define VESSEL_EVAL_SCENE_EVAL_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/metrics.h"
#include "vessel_eval/scene.h"

namespace vessel_eval {

// `pred` may be null: a missing prediction, evaluated as an empty scene.
absl::StatusOr<MetricReport> EvaluateScene(const SceneAnnotation& gt,
                                           const SceneAnnotation* pred,
                                           const EvalConfig& config);

// Content-scope evaluation of one scene given predicted content per GT vessel
// id. Every key must name a GT vessel; vessels without a key are evaluated
// against empty content.
absl::StatusOr<ScopeReport> PerVesselContentEval(
    const SceneAnnotation& gt,
    const std::map<std::string, std::vector<Instance>>& pred_content);

struct ScenePair {
  // Sort key of the fold; normally the document file name.
  std::string key;
  const SceneAnnotation* gt = nullptr;
  const SceneAnnotation* pred = nullptr;
};

// Evaluates scenes on `workers` OpenMP threads and folds the per-scene
// reports in ascending key order, so the result does not depend on the
// worker count or on the input order. Keys must be unique.
absl::StatusOr<MetricReport> EvaluateBatch(std::span<const ScenePair> pairs,
                                           const EvalConfig& config,
                                           int workers);

// Single-threaded reference for EvaluateBatch.
absl::StatusOr<MetricReport> EvaluateBatchSerial(
    std::span<const ScenePair> pairs, const EvalConfig& config);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_SCENE_EVAL_H_
