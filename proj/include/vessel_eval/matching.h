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

#ifndef VESSEL_EVAL_MATCHING_H_
#define VESSEL_EVAL_MATCHING_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/hungarian.h"
#include "vessel_eval/mask.h"
#include "vessel_eval/taxonomy.h"

namespace vessel_eval {

// Non-owning view of a segment: its mask and its label set.
struct SegmentView {
  const BinaryMask* mask = nullptr;
  const LabelSet* labels = nullptr;
};

enum class MatchMode { kWithClass, kClassAgnostic };

// A segment pair counts as a match only above this IOU (strict).
inline constexpr double kMatchIouThreshold = 0.5;

struct Match {
  int pred = 0;
  int gt = 0;
  double iou = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchResult {
  // Sorted by gt index.
  std::vector<Match> matches;
  // Ascending.
  std::vector<int> fn_gt;
  std::vector<int> fp_pred;
  MatchMode mode = MatchMode::kWithClass;
};

// Entry (i, j) is iou(preds[i], gts[j]); undefined (empty vs empty) is 0.
// Rows are split across OpenMP threads when the matrix is large enough.
absl::StatusOr<DenseMatrix> ComputeIouMatrix(
    std::span<const BinaryMask* const> preds,
    std::span<const BinaryMask* const> gts);

// Single-threaded reference for ComputeIouMatrix.
absl::StatusOr<DenseMatrix> ComputeIouMatrixSerial(
    std::span<const BinaryMask* const> preds,
    std::span<const BinaryMask* const> gts);

// Panoptic-quality matching. Candidate pairs have IOU > 0.5 and, in
// kWithClass mode, intersecting label sets. Candidates are taken greedily in
// order of (IOU desc, gt index asc, pred index asc); each segment is matched
// at most once.
absl::StatusOr<MatchResult> PqMatch(std::span<const SegmentView> preds,
                                    std::span<const SegmentView> gts,
                                    MatchMode mode);

// Appends empty masks until there are exactly `slot_count` masks. More GT
// masks than slots is a capacity error, never a truncation.
absl::StatusOr<std::vector<BinaryMask>> PadInstances(
    std::span<const BinaryMask> gt_masks, int slot_count, int64_t width,
    int64_t height);

struct SemanticMap {
  std::string label;
  BinaryMask mask;
};

// Label c goes to instance i iff more than 33% of the instance's area lies in
// the semantic map of c. Any number of labels may be assigned.
absl::StatusOr<std::vector<LabelSet>> AssignClassesToInstances(
    std::span<const BinaryMask> instance_masks,
    std::span<const SemanticMap> semantic_maps);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_MATCHING_H_
