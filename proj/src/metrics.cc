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

#include "vessel_eval/metrics.h"

#include <cmath>
#include <set>
#include <utility>

#include "str_cat.h"

namespace vessel_eval {
namespace {

Ratio Divide(double numerator, double denominator) {
  if (denominator == 0.0) return Ratio();
  return numerator / denominator;
}

template <typename Map, typename MergeFn>
void MergeMaps(const Map& from, Map* into, MergeFn merge) {
  for (const auto& [key, value] : from) merge(value, &(*into)[key]);
}

}  // namespace

void SemanticCounts::Merge(const SemanticCounts& other) {
  intersection += other.intersection;
  union_px += other.union_px;
  gt_px += other.gt_px;
  pred_px += other.pred_px;
}

SemanticScores ScoreSemantic(const SemanticCounts& c) {
  SemanticScores s;
  if (c.gt_px == 0 && c.pred_px == 0) return s;
  const auto i = static_cast<double>(c.intersection);
  s.iou = Divide(i, static_cast<double>(c.union_px));
  s.recall = Divide(i, static_cast<double>(c.gt_px));
  s.precision =
      c.pred_px == 0 ? Ratio(0.0) : Divide(i, static_cast<double>(c.pred_px));
  return s;
}

absl::StatusOr<SemanticResult> SemanticMetrics(const ClassMaps& pred,
                                               const ClassMaps& gt) {
  std::set<std::string> labels;
  for (const auto& [label, unused] : pred) labels.insert(label);
  for (const auto& [label, unused] : gt) labels.insert(label);
  SemanticResult result;
  for (const std::string& label : labels) {
    auto p = pred.find(label);
    auto g = gt.find(label);
    SemanticCounts counts;
    if (p != pred.end() && g != gt.end()) {
      absl::StatusOr<int64_t> inter = IntersectionArea(p->second, g->second);
      if (!inter.ok()) return inter.status();
      counts.intersection = *inter;
    }
    counts.pred_px = p == pred.end() ? 0 : p->second.Area();
    counts.gt_px = g == gt.end() ? 0 : g->second.Area();
    counts.union_px = counts.gt_px + counts.pred_px - counts.intersection;
    result.counters[label] = counts;
    result.scores[label] = ScoreSemantic(counts);
  }
  if (!pred.empty() && !gt.empty() &&
      !pred.begin()->second.SameDimensions(gt.begin()->second)) {
    return absl::InvalidArgumentError("semantic maps differ in dimensions");
  }
  return result;
}

PanopticScores ScorePanoptic(const PanopticCounts& c) {
  PanopticScores s;
  if (c.tp == 0 && c.fp == 0.0 && c.fn == 0) return s;
  const auto tp = static_cast<double>(c.tp);
  s.rq = tp / (tp + 0.5 * (c.fp + static_cast<double>(c.fn)));
  if (c.tp > 0) {
    s.sq = c.iou_sum / tp;
    s.pq = *s.rq * *s.sq;
  } else {
    s.pq = 0.0;
  }
  return s;
}

absl::StatusOr<std::map<std::string, double>> SplitFalsePositives(
    double total_fp, const std::map<std::string, double>& class_fractions) {
  double sum = 0.0;
  for (const auto& [label, fraction] : class_fractions) {
    if (!(fraction >= 0.0) || !std::isfinite(fraction)) {
      return absl::InvalidArgumentError(
          StrCat("fraction for '", label, "' is negative or not finite"));
    }
    sum += fraction;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        StrCat("class fractions sum to ", sum, ", not 1"));
  }
  std::map<std::string, double> out;
  for (const auto& [label, fraction] : class_fractions) {
    out[label] = total_fp * fraction;
  }
  return out;
}

int64_t PanopticTable::TotalGtLabels() const {
  int64_t total = 0;
  for (const auto& [label, counts] : classes) total += counts.gt_segments;
  return total;
}

void ApportionFalsePositives(PanopticTable* table) {
  const int64_t total = table->TotalGtLabels();
  for (auto& [label, counts] : table->classes) counts.fp = 0.0;
  if (total == 0) return;
  std::map<std::string, double> fractions;
  for (const auto& [label, counts] : table->classes) {
    fractions[label] =
        static_cast<double>(counts.gt_segments) / static_cast<double>(total);
  }
  absl::StatusOr<std::map<std::string, double>> split = SplitFalsePositives(
      static_cast<double>(table->unmatched_predictions), fractions);
  if (!split.ok()) return;  // unreachable: fractions come from counts
  for (const auto& [label, fp] : *split) table->classes[label].fp = fp;
}

void PanopticTable::Merge(const PanopticTable& other) {
  MergeMaps(other.classes, &classes,
            [](const PanopticCounts& from, PanopticCounts* into) {
              into->tp += from.tp;
              into->fp += from.fp;
              into->fn += from.fn;
              into->iou_sum += from.iou_sum;
              into->gt_segments += from.gt_segments;
            });
  unmatched_predictions += other.unmatched_predictions;
  if (mode == MatchMode::kClassAgnostic) ApportionFalsePositives(this);
}

absl::StatusOr<PanopticTable> WithClassPanoptic(
    std::span<const SegmentView> preds, std::span<const SegmentView> gts) {
  std::set<std::string> labels;
  for (auto list : {preds, gts}) {
    for (const SegmentView& s : list) {
      labels.insert(s.labels->begin(), s.labels->end());
    }
  }
  PanopticTable table;
  table.mode = MatchMode::kWithClass;
  for (const std::string& label : labels) {
    std::vector<SegmentView> p, g;
    for (const SegmentView& s : preds) {
      if (s.labels->contains(label)) p.push_back(s);
    }
    for (const SegmentView& s : gts) {
      if (s.labels->contains(label)) g.push_back(s);
    }
    absl::StatusOr<MatchResult> match = PqMatch(p, g, MatchMode::kWithClass);
    if (!match.ok()) return match.status();
    PanopticCounts& counts = table.classes[label];
    counts.tp = static_cast<int64_t>(match->matches.size());
    counts.fp = static_cast<double>(match->fp_pred.size());
    counts.fn = static_cast<int64_t>(match->fn_gt.size());
    counts.gt_segments = static_cast<int64_t>(g.size());
    for (const Match& m : match->matches) counts.iou_sum += m.iou;
  }
  return table;
}

absl::StatusOr<PanopticTable> ClassAgnosticPanoptic(
    std::span<const SegmentView> preds, std::span<const SegmentView> gts) {
  absl::StatusOr<MatchResult> match =
      PqMatch(preds, gts, MatchMode::kClassAgnostic);
  if (!match.ok()) return match.status();
  PanopticTable table;
  table.mode = MatchMode::kClassAgnostic;
  table.unmatched_predictions = static_cast<int64_t>(match->fp_pred.size());
  for (const SegmentView& s : gts) {
    for (const std::string& label : *s.labels) {
      table.classes[label].gt_segments += 1;
    }
  }
  for (const Match& m : match->matches) {
    for (const std::string& label : *gts[m.gt].labels) {
      table.classes[label].tp += 1;
      table.classes[label].iou_sum += m.iou;
    }
  }
  for (int g : match->fn_gt) {
    for (const std::string& label : *gts[g].labels) {
      table.classes[label].fn += 1;
    }
  }
  ApportionFalsePositives(&table);
  return table;
}

RelationScores ScoreRelation(const RelationCounts& c) {
  const auto tp = static_cast<double>(c.tp);
  return {Divide(tp, tp + static_cast<double>(c.fp)),
          Divide(tp, tp + static_cast<double>(c.fn)),
          Divide(tp, tp + static_cast<double>(c.fp + c.fn))};
}

namespace {

absl::StatusOr<std::set<Relation>> CheckRelationSet(
    std::span<const Relation> relations, const std::set<std::string>& universe,
    std::string_view side) {
  std::set<Relation> set(relations.begin(), relations.end());
  for (const Relation& r : set) {
    const std::string name = StrCat(side, " ", RelationKindName(r.kind), "(",
                                    r.subject, ", ", r.object, ")");
    if (!universe.contains(r.subject) || !universe.contains(r.object)) {
      return absl::InvalidArgumentError(
          StrCat(name, " has an endpoint outside the vessel set"));
    }
    if (r.subject == r.object) {
      return absl::InvalidArgumentError(StrCat(name, " is reflexive"));
    }
    Relation mirror{r.kind, r.object, r.subject};
    if (r.kind == RelationKind::kInside) mirror.kind = RelationKind::kContain;
    if (r.kind == RelationKind::kContain) mirror.kind = RelationKind::kInside;
    if (!set.contains(mirror)) {
      return absl::InvalidArgumentError(StrCat(name, " lacks its reciprocal"));
    }
  }
  return set;
}

void Count(bool in_gt, bool in_pred, RelationCounts* counts) {
  if (in_gt && in_pred) {
    ++counts->tp;
  } else if (in_pred) {
    ++counts->fp;
  } else if (in_gt) {
    ++counts->fn;
  }
}

}  // namespace

absl::StatusOr<std::map<std::string, RelationCounts>> RelationshipMetrics(
    std::span<const Relation> pred, std::span<const Relation> gt,
    std::span<const std::string> universe) {
  const std::set<std::string> ids(universe.begin(), universe.end());
  absl::StatusOr<std::set<Relation>> pred_set =
      CheckRelationSet(pred, ids, "predicted");
  if (!pred_set.ok()) return pred_set.status();
  absl::StatusOr<std::set<Relation>> gt_set = CheckRelationSet(gt, ids, "GT");
  if (!gt_set.ok()) return gt_set.status();

  auto has = [](const std::set<Relation>& set, RelationKind kind,
                const std::string& a,
                const std::string& b) { return set.contains({kind, a, b}); };
  auto related = [&](const std::set<Relation>& set, const std::string& a,
                     const std::string& b) {
    return has(set, RelationKind::kLinked, a, b) ||
           has(set, RelationKind::kInside, a, b) ||
           has(set, RelationKind::kInside, b, a) ||
           has(set, RelationKind::kContain, a, b) ||
           has(set, RelationKind::kContain, b, a);
  };

  std::map<std::string, RelationCounts> out;
  for (const char* name : kRelationClasses) out[name];
  for (const std::string& a : ids) {
    for (const std::string& b : ids) {
      if (a == b) continue;
      Count(has(*gt_set, RelationKind::kInside, a, b),
            has(*pred_set, RelationKind::kInside, a, b), &out["inside"]);
      Count(has(*gt_set, RelationKind::kContain, a, b),
            has(*pred_set, RelationKind::kContain, a, b), &out["contain"]);
      if (a < b) {
        Count(has(*gt_set, RelationKind::kLinked, a, b),
              has(*pred_set, RelationKind::kLinked, a, b), &out["linked"]);
        Count(!related(*gt_set, a, b), !related(*pred_set, a, b), &out["none"]);
      }
    }
  }
  return out;
}

void MacroStat::Add(const Ratio& value) {
  if (!value.has_value()) return;
  sum += *value;
  ++support;
}

void MacroStat::Merge(const MacroStat& other) {
  sum += other.sum;
  support += other.support;
}

Ratio MacroStat::Mean() const {
  if (support == 0) return Ratio();
  return sum / static_cast<double>(support);
}

void MergeMacro(const MacroTable& from, MacroTable* into) {
  for (const auto& [label, metrics] : from) {
    auto& target = (*into)[label];
    for (const auto& [metric, stat] : metrics) target[metric].Merge(stat);
  }
}

void PoolReport::Merge(const PoolReport& other) {
  with_class.Merge(other.with_class);
  class_agnostic.Merge(other.class_agnostic);
  MergeMacro(other.with_class_macro, &with_class_macro);
  MergeMacro(other.class_agnostic_macro, &class_agnostic_macro);
}

void ScopeReport::Merge(const ScopeReport& other) {
  MergeMaps(other.semantic, &semantic,
            [](const SemanticCounts& from, SemanticCounts* into) {
              into->Merge(from);
            });
  MergeMacro(other.semantic_macro, &semantic_macro);
  MergeMaps(other.pools, &pools, [](const PoolReport& from, PoolReport* into) {
    into->Merge(from);
  });
  units += other.units;
}

MetricReport MetricReport::Empty(const EvalConfig& config) {
  MetricReport report;
  report.config = config;
  if (config.relations) {
    for (const char* name : kRelationClasses) report.relations[name];
  }
  return report;
}

absl::StatusOr<MetricReport> MergeReports(const MetricReport& a,
                                          const MetricReport& b) {
  if (!(a.config == b.config)) {
    return absl::InvalidArgumentError(
        "cannot merge reports built with different configurations");
  }
  MetricReport out = a;
  out.scene_count += b.scene_count;
  out.scene.Merge(b.scene);
  out.content.Merge(b.content);
  MergeMaps(b.relations, &out.relations,
            [](const RelationCounts& from, RelationCounts* into) {
              into->tp += from.tp;
              into->fp += from.fp;
              into->fn += from.fn;
            });
  out.unmapped_pred_relations += b.unmapped_pred_relations;
  return out;
}

absl::StatusOr<MetricReport> AggregateReports(
    std::span<const MetricReport> reports) {
  if (reports.empty()) return MetricReport::Empty(EvalConfig{});
  MetricReport out = MetricReport::Empty(reports.front().config);
  for (const MetricReport& r : reports) {
    absl::StatusOr<MetricReport> merged = MergeReports(out, r);
    if (!merged.ok()) return merged.status();
    out = *std::move(merged);
  }
  return out;
}

}  // namespace vessel_eval
