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

// Segmentation and relationship metrics with mergeable raw counters.
//
// Every ratio is a Ratio: std::nullopt marks an undefined value (zero
// denominator), which is skipped by averages rather than read as 0 or 1.

#ifndef VESSEL_EVAL_METRICS_H_
#define VESSEL_EVAL_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/mask.h"
#include "vessel_eval/matching.h"
#include "vessel_eval/scene.h"

namespace vessel_eval {

// ---------------------------------------------------------------------------
// Semantic segmentation.

struct SemanticCounts {
  int64_t intersection = 0;
  int64_t union_px = 0;
  int64_t gt_px = 0;
  int64_t pred_px = 0;

  void Merge(const SemanticCounts& other);
  friend bool operator==(const SemanticCounts&,
                         const SemanticCounts&) = default;
};

struct SemanticScores {
  Ratio iou;
  Ratio precision;
  Ratio recall;
};

// iou = I/U, precision = I/pred, recall = I/gt. A class with no GT and no
// predicted pixels is absent (all three undefined). With GT pixels but no
// prediction, precision is reported as 0.
SemanticScores ScoreSemantic(const SemanticCounts& counts);

// Per-label binary maps of one image or one vessel.
using ClassMaps = std::map<std::string, BinaryMask>;

struct SemanticResult {
  std::map<std::string, SemanticCounts> counters;
  std::map<std::string, SemanticScores> scores;
};

// Labels missing from one side count as empty maps there.
absl::StatusOr<SemanticResult> SemanticMetrics(const ClassMaps& pred,
                                               const ClassMaps& gt);

// ---------------------------------------------------------------------------
// Panoptic quality.

struct PanopticCounts {
  int64_t tp = 0;
  // Real-valued in class-agnostic mode, where unmatched predictions are
  // apportioned to classes.
  double fp = 0.0;
  int64_t fn = 0;
  double iou_sum = 0.0;
  // GT segments carrying the class (tp + fn); weights the FP split.
  int64_t gt_segments = 0;

  friend bool operator==(const PanopticCounts&,
                         const PanopticCounts&) = default;
};

struct PanopticScores {
  Ratio pq;
  Ratio sq;
  Ratio rq;
};

// rq = tp / (tp + (fp + fn) / 2), sq = iou_sum / tp, pq = rq * sq.
// With tp == 0 and some fp/fn: rq = pq = 0 and sq undefined. A class with
// tp == fp == fn == 0 is absent.
PanopticScores ScorePanoptic(const PanopticCounts& counts);

// fp_c = total * fraction_c. Fractions must be non-negative and sum to 1
// within 1e-9.
absl::StatusOr<std::map<std::string, double>> SplitFalsePositives(
    double total_fp, const std::map<std::string, double>& class_fractions);

struct PanopticTable {
  MatchMode mode = MatchMode::kWithClass;
  std::map<std::string, PanopticCounts> classes;
  // Predicted segments matching no GT segment; class-agnostic mode only.
  int64_t unmatched_predictions = 0;

  // Sums counters. In class-agnostic mode the FP split is recomputed from
  // the merged GT class shares.
  void Merge(const PanopticTable& other);

  // Sum of per-class GT segment counts (multi-label segments counted once
  // per label).
  int64_t TotalGtLabels() const;

  friend bool operator==(const PanopticTable&, const PanopticTable&) = default;
};

// Standard PQ counters: for each label c, segments carrying c are matched
// among themselves.
absl::StatusOr<PanopticTable> WithClassPanoptic(
    std::span<const SegmentView> preds, std::span<const SegmentView> gts);

// Class-agnostic counters: one label-blind matching; a matched GT segment is
// a TP for each of its labels, an unmatched one an FN for each. The
// unmatched predictions are split across labels by GT label share.
absl::StatusOr<PanopticTable> ClassAgnosticPanoptic(
    std::span<const SegmentView> preds, std::span<const SegmentView> gts);

// Recomputes the class-agnostic FP split from gt_segments. Leaves fp at 0
// when the table holds no GT labels.
void ApportionFalsePositives(PanopticTable* table);

// ---------------------------------------------------------------------------
// Relationships between vessels.

inline constexpr const char* kRelationClasses[] = {"contain", "inside",
                                                   "linked", "none"};

struct RelationCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  friend bool operator==(const RelationCounts&,
                         const RelationCounts&) = default;
};

struct RelationScores {
  Ratio precision;
  Ratio recall;
  Ratio iou;
};

RelationScores ScoreRelation(const RelationCounts& counts);

// inside and contain are scored on ordered vessel pairs. linked is symmetric
// and scored once per unordered pair, as is none (a pair with no relation in
// either direction). Both relation sets must be internally consistent
// (inside/contain duals and mirrored links) and reference only `universe`.
absl::StatusOr<std::map<std::string, RelationCounts>> RelationshipMetrics(
    std::span<const Relation> pred, std::span<const Relation> gt,
    std::span<const std::string> universe);

// ---------------------------------------------------------------------------
// Reports.

// Running mean over evaluation units (vessels) that define a value.
struct MacroStat {
  double sum = 0.0;
  int64_t support = 0;

  void Add(const Ratio& value);
  void Merge(const MacroStat& other);
  Ratio Mean() const;

  friend bool operator==(const MacroStat&, const MacroStat&) = default;
};

// label -> metric name -> accumulator.
using MacroTable = std::map<std::string, std::map<std::string, MacroStat>>;

void MergeMacro(const MacroTable& from, MacroTable* into);

// Instance pools evaluated separately; matching never crosses pools.
inline constexpr const char* kPoolVessel = "vessel";
inline constexpr const char* kPoolMaterial = "material";
inline constexpr const char* kPoolPart = "part";

struct PoolReport {
  PanopticTable with_class{MatchMode::kWithClass, {}, 0};
  PanopticTable class_agnostic{MatchMode::kClassAgnostic, {}, 0};
  // Per-vessel means of pq/sq/rq; content scope only.
  MacroTable with_class_macro;
  MacroTable class_agnostic_macro;

  void Merge(const PoolReport& other);
  friend bool operator==(const PoolReport&, const PoolReport&) = default;
};

// One evaluation scope: the full image, or vessel content evaluated vessel
// by vessel.
struct ScopeReport {
  // Micro counters.
  std::map<std::string, SemanticCounts> semantic;
  // Per-vessel means of iou/precision/recall; content scope only.
  MacroTable semantic_macro;
  std::map<std::string, PoolReport> pools;
  // Images (scene scope) or vessels (content scope) evaluated.
  int64_t units = 0;

  void Merge(const ScopeReport& other);
  friend bool operator==(const ScopeReport&, const ScopeReport&) = default;
};

struct EvalConfig {
  bool per_vessel = true;
  bool relations = true;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

struct MetricReport {
  EvalConfig config;
  int64_t scene_count = 0;
  ScopeReport scene;
  // Filled when config.per_vessel.
  ScopeReport content;
  // Filled when config.relations.
  std::map<std::string, RelationCounts> relations;
  // Predicted vessel relations whose endpoints matched no GT vessel.
  int64_t unmapped_pred_relations = 0;

  static MetricReport Empty(const EvalConfig& config);

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Sums counters and macro accumulators. Merge is commutative, and
// associative up to floating-point summation order of iou sums. Reports
// built with different configurations cannot be merged.
absl::StatusOr<MetricReport> MergeReports(const MetricReport& a,
                                          const MetricReport& b);

// Left fold of MergeReports in list order.
absl::StatusOr<MetricReport> AggregateReports(
    std::span<const MetricReport> reports);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_METRICS_H_
