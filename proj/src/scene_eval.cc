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

#include "vessel_eval/scene_eval.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <utility>

#include "str_cat.h"

namespace vessel_eval {
namespace {

using InstanceList = std::vector<const Instance*>;

void AddMacro(MacroTable* table, const std::string& label, const char* metric,
              const Ratio& value) {
  if (value.has_value()) (*table)[label][metric].Add(value);
}

absl::StatusOr<ClassMaps> BuildClassMaps(const InstanceList& instances,
                                         int64_t width, int64_t height) {
  ClassMaps maps;
  for (const Instance* inst : instances) {
    for (const std::string& label : inst->Labels()) {
      auto it = maps.find(label);
      if (it == maps.end()) {
        maps.emplace(label, inst->mask);
        continue;
      }
      absl::StatusOr<BinaryMask> merged = MaskUnion(it->second, inst->mask);
      if (!merged.ok()) return merged.status();
      it->second = *std::move(merged);
    }
  }
  for (auto& [label, mask] : maps) {
    if (mask.width() != width || mask.height() != height) {
      return absl::InvalidArgumentError(
          StrCat("mask for '", label, "' is ", mask.width(), "x", mask.height(),
                 ", image is ", width, "x", height));
    }
  }
  return maps;
}

// Segment views over `instances`; `labels` owns the label sets.
std::vector<SegmentView> Views(const InstanceList& instances,
                               std::vector<LabelSet>* labels) {
  labels->clear();
  labels->reserve(instances.size());
  for (const Instance* inst : instances) labels->push_back(inst->Labels());
  std::vector<SegmentView> views;
  views.reserve(instances.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    views.push_back({&instances[i]->mask, &(*labels)[i]});
  }
  return views;
}

InstanceList OfKind(const InstanceList& instances, InstanceKind kind) {
  InstanceList out;
  for (const Instance* inst : instances) {
    if (inst->kind == kind) out.push_back(inst);
  }
  return out;
}

InstanceList AllOf(const SceneAnnotation& scene) {
  InstanceList out;
  out.reserve(scene.instances.size());
  for (const Instance& inst : scene.instances) out.push_back(&inst);
  return out;
}

absl::StatusOr<PoolReport> EvaluatePool(const InstanceList& pred,
                                        const InstanceList& gt) {
  std::vector<LabelSet> pred_labels, gt_labels;
  const std::vector<SegmentView> p = Views(pred, &pred_labels);
  const std::vector<SegmentView> g = Views(gt, &gt_labels);
  PoolReport pool;
  absl::StatusOr<PanopticTable> with_class = WithClassPanoptic(p, g);
  if (!with_class.ok()) return with_class.status();
  pool.with_class = *std::move(with_class);
  absl::StatusOr<PanopticTable> agnostic = ClassAgnosticPanoptic(p, g);
  if (!agnostic.ok()) return agnostic.status();
  pool.class_agnostic = *std::move(agnostic);
  return pool;
}

void AddPanopticMacro(const PanopticTable& table, MacroTable* macro) {
  for (const auto& [label, counts] : table.classes) {
    const PanopticScores s = ScorePanoptic(counts);
    AddMacro(macro, label, "pq", s.pq);
    AddMacro(macro, label, "sq", s.sq);
    AddMacro(macro, label, "rq", s.rq);
  }
}

struct PoolSpec {
  const char* name;
  InstanceKind kind;
};

constexpr PoolSpec kScenePools[] = {{kPoolVessel, InstanceKind::kVessel},
                                    {kPoolMaterial, InstanceKind::kMaterial},
                                    {kPoolPart, InstanceKind::kPart}};
constexpr PoolSpec kContentPools[] = {{kPoolMaterial, InstanceKind::kMaterial},
                                      {kPoolPart, InstanceKind::kPart}};

// Semantic counters and panoptic pools over one set of instances. With
// `macro`, per-unit scores are also accumulated into the macro tables.
absl::StatusOr<ScopeReport> EvaluateUnit(const InstanceList& pred,
                                         const InstanceList& gt, int64_t width,
                                         int64_t height,
                                         std::span<const PoolSpec> pools,
                                         bool macro) {
  ScopeReport scope;
  scope.units = 1;
  absl::StatusOr<ClassMaps> pred_maps = BuildClassMaps(pred, width, height);
  if (!pred_maps.ok()) return pred_maps.status();
  absl::StatusOr<ClassMaps> gt_maps = BuildClassMaps(gt, width, height);
  if (!gt_maps.ok()) return gt_maps.status();
  absl::StatusOr<SemanticResult> semantic =
      SemanticMetrics(*pred_maps, *gt_maps);
  if (!semantic.ok()) return semantic.status();
  scope.semantic = std::move(semantic->counters);
  if (macro) {
    for (const auto& [label, s] : semantic->scores) {
      AddMacro(&scope.semantic_macro, label, "iou", s.iou);
      AddMacro(&scope.semantic_macro, label, "precision", s.precision);
      AddMacro(&scope.semantic_macro, label, "recall", s.recall);
    }
  }
  for (const PoolSpec& spec : pools) {
    absl::StatusOr<PoolReport> pool =
        EvaluatePool(OfKind(pred, spec.kind), OfKind(gt, spec.kind));
    if (!pool.ok()) return pool.status();
    if (macro) {
      AddPanopticMacro(pool->with_class, &pool->with_class_macro);
      AddPanopticMacro(pool->class_agnostic, &pool->class_agnostic_macro);
    }
    scope.pools[spec.name] = *std::move(pool);
  }
  return scope;
}

// Direct material/part content of `vessel_id`, in instance order.
absl::StatusOr<InstanceList> ContentOf(const SceneAnnotation& scene,
                                       const std::string& vessel_id) {
  absl::StatusOr<std::set<std::string>> ids = DirectContentOf(scene, vessel_id);
  if (!ids.ok()) return ids.status();
  InstanceList out;
  for (const Instance& inst : scene.instances) {
    if (inst.kind != InstanceKind::kVessel && ids->contains(inst.id)) {
      out.push_back(&inst);
    }
  }
  return out;
}

absl::StatusOr<ScopeReport> ContentScope(
    const SceneAnnotation& gt,
    const std::map<std::string, InstanceList>& pred_content) {
  ScopeReport total;
  const InstanceList none;
  for (const Instance& vessel : gt.instances) {
    if (vessel.kind != InstanceKind::kVessel) continue;
    absl::StatusOr<InstanceList> gt_content = ContentOf(gt, vessel.id);
    if (!gt_content.ok()) return gt_content.status();
    auto it = pred_content.find(vessel.id);
    const InstanceList& pred = it == pred_content.end() ? none : it->second;
    absl::StatusOr<ScopeReport> unit = EvaluateUnit(
        pred, *gt_content, gt.width, gt.height, kContentPools, /*macro=*/true);
    if (!unit.ok()) {
      return absl::Status(
          unit.status().code(),
          StrCat("vessel '", vessel.id, "': ", unit.status().message()));
    }
    total.Merge(*unit);
  }
  return total;
}

absl::Status CheckContentKeys(const SceneAnnotation& gt,
                              const std::vector<std::string>& keys) {
  for (const std::string& key : keys) {
    const Instance* inst = gt.Find(key);
    if (inst == nullptr || inst->kind != InstanceKind::kVessel) {
      return absl::NotFoundError(StrCat("'", key, "' is not a GT vessel id"));
    }
  }
  return absl::OkStatus();
}

// Maps matched predicted vessel ids to GT vessel ids.
absl::StatusOr<std::map<std::string, std::string>> MatchVessels(
    const SceneAnnotation& pred, const SceneAnnotation& gt) {
  const InstanceList p = OfKind(AllOf(pred), InstanceKind::kVessel);
  const InstanceList g = OfKind(AllOf(gt), InstanceKind::kVessel);
  std::vector<LabelSet> pl, gl;
  const std::vector<SegmentView> pv = Views(p, &pl);
  const std::vector<SegmentView> gv = Views(g, &gl);
  absl::StatusOr<MatchResult> match =
      PqMatch(pv, gv, MatchMode::kClassAgnostic);
  if (!match.ok()) return match.status();
  std::map<std::string, std::string> out;
  for (const Match& m : match->matches) out[p[m.pred]->id] = g[m.gt]->id;
  return out;
}

bool IsVessel(const SceneAnnotation& scene, const std::string& id) {
  const Instance* inst = scene.Find(id);
  return inst != nullptr && inst->kind == InstanceKind::kVessel;
}

absl::Status EvaluateRelations(const SceneAnnotation& gt,
                               const SceneAnnotation& pred,
                               const std::map<std::string, std::string>& to_gt,
                               MetricReport* report) {
  std::vector<std::string> universe;
  for (const Instance& inst : gt.instances) {
    if (inst.kind == InstanceKind::kVessel) universe.push_back(inst.id);
  }
  std::vector<Relation> gt_rel, pred_rel;
  for (const Relation& r : gt.relations) {
    if (IsVessel(gt, r.subject) && IsVessel(gt, r.object)) gt_rel.push_back(r);
  }
  for (const Relation& r : pred.relations) {
    if (!IsVessel(pred, r.subject) || !IsVessel(pred, r.object)) continue;
    auto s = to_gt.find(r.subject);
    auto o = to_gt.find(r.object);
    if (s == to_gt.end() || o == to_gt.end()) {
      ++report->unmapped_pred_relations;
      continue;
    }
    pred_rel.push_back({r.kind, s->second, o->second});
  }
  absl::StatusOr<std::map<std::string, RelationCounts>> counts =
      RelationshipMetrics(pred_rel, gt_rel, universe);
  if (!counts.ok()) return counts.status();
  report->relations = *std::move(counts);
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<ScopeReport> PerVesselContentEval(
    const SceneAnnotation& gt,
    const std::map<std::string, std::vector<Instance>>& pred_content) {
  std::vector<std::string> keys;
  std::map<std::string, InstanceList> views;
  for (const auto& [key, instances] : pred_content) {
    keys.push_back(key);
    InstanceList& list = views[key];
    for (const Instance& inst : instances) list.push_back(&inst);
  }
  if (absl::Status s = CheckContentKeys(gt, keys); !s.ok()) return s;
  return ContentScope(gt, views);
}

absl::StatusOr<MetricReport> EvaluateScene(const SceneAnnotation& gt,
                                           const SceneAnnotation* pred,
                                           const EvalConfig& config) {
  SceneAnnotation missing;
  missing.width = gt.width;
  missing.height = gt.height;
  if (pred == nullptr) pred = &missing;
  if (pred->width != gt.width || pred->height != gt.height) {
    return absl::InvalidArgumentError(StrCat("prediction is ", pred->width, "x",
                                             pred->height, ", GT is ", gt.width,
                                             "x", gt.height));
  }

  MetricReport report = MetricReport::Empty(config);
  report.scene_count = 1;
  absl::StatusOr<ScopeReport> scene =
      EvaluateUnit(AllOf(*pred), AllOf(gt), gt.width, gt.height, kScenePools,
                   /*macro=*/false);
  if (!scene.ok()) return scene.status();
  report.scene = *std::move(scene);

  if (!config.per_vessel && !config.relations) return report;
  absl::StatusOr<std::map<std::string, std::string>> to_gt =
      MatchVessels(*pred, gt);
  if (!to_gt.ok()) return to_gt.status();

  if (config.per_vessel) {
    std::map<std::string, InstanceList> pred_content;
    for (const auto& [pred_id, gt_id] : *to_gt) {
      absl::StatusOr<InstanceList> content = ContentOf(*pred, pred_id);
      if (!content.ok()) return content.status();
      pred_content[gt_id] = *std::move(content);
    }
    absl::StatusOr<ScopeReport> content = ContentScope(gt, pred_content);
    if (!content.ok()) return content.status();
    report.content = *std::move(content);
  }
  if (config.relations) {
    if (absl::Status s = EvaluateRelations(gt, *pred, *to_gt, &report);
        !s.ok()) {
      return s;
    }
  }
  return report;
}

namespace {

absl::StatusOr<std::vector<size_t>> SortedOrder(
    std::span<const ScenePair> pairs) {
  std::vector<size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return pairs[a].key < pairs[b].key; });
  for (size_t i = 1; i < order.size(); ++i) {
    if (pairs[order[i]].key == pairs[order[i - 1]].key) {
      return absl::InvalidArgumentError(
          StrCat("duplicate scene key '", pairs[order[i]].key, "'"));
    }
  }
  for (const ScenePair& p : pairs) {
    if (p.gt == nullptr) {
      return absl::InvalidArgumentError(
          StrCat("scene '", p.key, "' has no GT"));
    }
  }
  return order;
}

absl::StatusOr<MetricReport> Fold(
    std::span<const ScenePair> pairs, const std::vector<size_t>& order,
    std::vector<std::optional<absl::StatusOr<MetricReport>>>& results,
    const EvalConfig& config) {
  MetricReport total = MetricReport::Empty(config);
  for (size_t index : order) {
    const absl::StatusOr<MetricReport>& r = *results[index];
    if (!r.ok()) {
      return absl::Status(r.status().code(),
                          StrCat(pairs[index].key, ": ", r.status().message()));
    }
    absl::StatusOr<MetricReport> merged = MergeReports(total, *r);
    if (!merged.ok()) return merged.status();
    total = *std::move(merged);
  }
  return total;
}

}  // namespace

absl::StatusOr<MetricReport> EvaluateBatch(std::span<const ScenePair> pairs,
                                           const EvalConfig& config,
                                           int workers) {
  if (workers < 1) {
    return absl::InvalidArgumentError(
        StrCat("worker count must be at least 1, got ", workers));
  }
  absl::StatusOr<std::vector<size_t>> order = SortedOrder(pairs);
  if (!order.ok()) return order.status();
  std::vector<std::optional<absl::StatusOr<MetricReport>>> results(
      pairs.size());
  const int n = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (int i = 0; i < n; ++i) {
    results[i] = EvaluateScene(*pairs[i].gt, pairs[i].pred, config);
  }
  return Fold(pairs, *order, results, config);
}

absl::StatusOr<MetricReport> EvaluateBatchSerial(
    std::span<const ScenePair> pairs, const EvalConfig& config) {
  absl::StatusOr<std::vector<size_t>> order = SortedOrder(pairs);
  if (!order.ok()) return order.status();
  std::vector<std::optional<absl::StatusOr<MetricReport>>> results(
      pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    results[i] = EvaluateScene(*pairs[i].gt, pairs[i].pred, config);
  }
  return Fold(pairs, *order, results, config);
}

}  // namespace vessel_eval
