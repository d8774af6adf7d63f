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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "test_util.h"
#include "vessel_eval/report_io.h"
#include "vessel_eval/synthetic.h"

namespace vessel_eval {
namespace {

using ::vessel_eval::testing::AddContainment;
using ::vessel_eval::testing::MakeInstance;
using ::vessel_eval::testing::Rect;
using ::vessel_eval::testing::SmallScene;
using ::vessel_eval::testing::Unwrap;

constexpr EvalConfig kFull{true, true};

void ExpectPerfectTable(const PanopticTable& t) {
  for (const auto& [label, c] : t.classes) {
    const PanopticScores s = ScorePanoptic(c);
    if (c.gt_segments == 0) continue;
    EXPECT_EQ(s.pq, 1.0) << label;
    EXPECT_EQ(s.sq, 1.0) << label;
    EXPECT_EQ(s.rq, 1.0) << label;
  }
}

void ExpectPerfectScope(const ScopeReport& scope) {
  for (const auto& [label, c] : scope.semantic) {
    const SemanticScores s = ScoreSemantic(c);
    if (c.gt_px == 0) continue;
    EXPECT_EQ(s.iou, 1.0) << label;
    EXPECT_EQ(s.precision, 1.0) << label;
    EXPECT_EQ(s.recall, 1.0) << label;
  }
  for (const auto& [pool, report] : scope.pools) {
    ExpectPerfectTable(report.with_class);
    ExpectPerfectTable(report.class_agnostic);
    for (const MacroTable* macro :
         {&report.with_class_macro, &report.class_agnostic_macro}) {
      for (const auto& [label, metrics] : *macro) {
        for (const auto& [name, stat] : metrics) {
          EXPECT_EQ(stat.Mean(), 1.0) << pool << " " << label << " " << name;
        }
      }
    }
  }
  for (const auto& [label, metrics] : scope.semantic_macro) {
    for (const auto& [name, stat] : metrics) EXPECT_EQ(stat.Mean(), 1.0);
  }
}

TEST(EvaluateSceneTest, IdentityIsPerfect) {
  const SceneAnnotation s = SmallScene();
  const MetricReport r = Unwrap(EvaluateScene(s, &s, kFull));
  EXPECT_EQ(r.scene_count, 1);
  ExpectPerfectScope(r.scene);
  ExpectPerfectScope(r.content);
  EXPECT_EQ(r.content.units, 2);  // two GT vessels
  EXPECT_EQ(r.relations.at("linked").tp, 1);
  for (const auto& [name, c] : r.relations) {
    EXPECT_EQ(c.fp + c.fn, 0) << name;
  }
  EXPECT_EQ(r.scene.pools.at(kPoolMaterial).with_class.classes.at("blood").tp,
            1);
}

TEST(EvaluateSceneTest, MissingPredictionIsAllFalseNegatives) {
  const SceneAnnotation s = SmallScene();
  const MetricReport r = Unwrap(EvaluateScene(s, nullptr, kFull));
  for (const auto& [label, c] : r.scene.semantic) {
    const SemanticScores sc = ScoreSemantic(c);
    EXPECT_EQ(sc.recall, 0.0) << label;
    EXPECT_EQ(sc.iou, 0.0) << label;
  }
  for (const auto& [pool, report] : r.scene.pools) {
    for (const auto& [label, c] : report.with_class.classes) {
      EXPECT_EQ(c.tp, 0);
      EXPECT_EQ(c.fn, c.gt_segments);
      EXPECT_EQ(ScorePanoptic(c).rq, 0.0);
    }
  }
  const RelationScores linked = ScoreRelation(r.relations.at("linked"));
  EXPECT_EQ(linked.recall, 0.0);
  EXPECT_FALSE(linked.precision.has_value());
}

TEST(EvaluateSceneTest, DimensionMismatch) {
  const SceneAnnotation s = SmallScene();
  SceneAnnotation other;
  other.width = 3;
  other.height = 3;
  EXPECT_EQ(EvaluateScene(s, &other, kFull).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(EvaluateSceneTest, DroppedSegmentLowersRecognition) {
  const SceneAnnotation gt = SmallScene();
  SceneAnnotation pred = gt;
  std::erase_if(pred.instances,
                [](const Instance& i) { return i.id == "powder"; });
  std::erase_if(pred.relations, [](const Relation& r) {
    return r.subject == "powder" || r.object == "powder";
  });
  const MetricReport r = Unwrap(EvaluateScene(gt, &pred, kFull));
  const PanopticCounts& solid =
      r.scene.pools.at(kPoolMaterial).class_agnostic.classes.at("solid");
  EXPECT_EQ(solid.tp, 0);
  EXPECT_EQ(solid.fn, 1);
  const PanopticCounts& filled =
      r.scene.pools.at(kPoolMaterial).class_agnostic.classes.at("filled");
  EXPECT_EQ(filled.tp, 1);
  EXPECT_EQ(filled.fn, 1);
  EXPECT_EQ(*ScorePanoptic(filled).rq, 1.0 / (1.0 + 0.5));
}

// Tube over the left half holding a 20 px liquid; jar over the right half
// holding a 20 px liquid.
SceneAnnotation TwoVessels() {
  SceneAnnotation s;
  s.width = 20;
  s.height = 10;
  s.instances.push_back(MakeInstance("tube", InstanceKind::kVessel,
                                     Rect(20, 10, 0, 0, 10, 10), {"tube"}));
  s.instances.push_back(MakeInstance("jar", InstanceKind::kVessel,
                                     Rect(20, 10, 10, 0, 20, 10), {"jar"}));
  s.instances.push_back(MakeInstance("l1", InstanceKind::kMaterial,
                                     Rect(20, 10, 0, 6, 10, 8), {"liquid"}));
  s.instances.push_back(MakeInstance("l2", InstanceKind::kMaterial,
                                     Rect(20, 10, 10, 6, 20, 8), {"liquid"}));
  AddContainment(&s, "l1", "tube");
  AddContainment(&s, "l2", "jar");
  s.Normalize();
  return s;
}

TEST(PerVesselTest, MacroAverage) {
  const SceneAnnotation gt = TwoVessels();
  std::map<std::string, std::vector<Instance>> pred;
  pred["tube"] = {*gt.Find("l1")};
  // Half of the jar's liquid: IOU 0.5.
  Instance half = *gt.Find("l2");
  half.mask = Rect(20, 10, 10, 6, 20, 7);
  pred["jar"] = {half};
  const ScopeReport r = Unwrap(PerVesselContentEval(gt, pred));
  EXPECT_EQ(r.units, 2);
  const MacroStat& iou = r.semantic_macro.at("liquid").at("iou");
  EXPECT_EQ(iou.support, 2);
  EXPECT_EQ(iou.Mean(), 0.75);
  // Micro counters are kept alongside.
  EXPECT_EQ(r.semantic.at("liquid").intersection, 30);
}

TEST(PerVesselTest, AbsentClassContributesNothing) {
  SceneAnnotation gt = TwoVessels();
  gt.instances.push_back(MakeInstance("f", InstanceKind::kMaterial,
                                      Rect(20, 10, 0, 4, 10, 5), {"foam"}));
  AddContainment(&gt, "f", "tube");
  gt.Normalize();
  const MetricReport r = Unwrap(EvaluateScene(gt, &gt, kFull));
  EXPECT_EQ(r.content.semantic_macro.at("foam").at("iou").support, 1);
  EXPECT_EQ(r.content.semantic_macro.at("liquid").at("iou").support, 2);
}

TEST(PerVesselTest, PerfectSingleVessel) {
  const SceneAnnotation gt = TwoVessels();
  std::map<std::string, std::vector<Instance>> pred;
  pred["tube"] = {*gt.Find("l1")};
  pred["jar"] = {*gt.Find("l2")};
  ExpectPerfectScope(Unwrap(PerVesselContentEval(gt, pred)));
}

TEST(PerVesselTest, UnknownVesselKey) {
  const SceneAnnotation gt = TwoVessels();
  EXPECT_EQ(PerVesselContentEval(gt, {{"bowl", {}}}).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(PerVesselContentEval(gt, {{"l1", {}}}).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(PerVesselTest, NestedVesselContentExcluded) {
  SyntheticPlan plan;
  plan.scenes = 1;
  plan.nested = true;
  plan.vessels = {1, 1};
  plan.materials = {1, 1};
  plan.parts = {0, 0};
  const SyntheticDataset data = Unwrap(GenerateSynthetic(plan));
  const SceneAnnotation& gt = data.scenes[0].gt;
  const MetricReport r = Unwrap(EvaluateScene(gt, &gt, kFull));
  // Every material is scored in exactly one vessel: the pipette's blood is
  // not also content of the tube.
  int64_t vessels = 0, materials = 0;
  for (const Instance& inst : gt.instances) {
    vessels += inst.kind == InstanceKind::kVessel;
    materials += inst.kind == InstanceKind::kMaterial;
  }
  EXPECT_EQ(r.content.units, vessels);
  EXPECT_EQ(r.content.pools.at(kPoolMaterial)
                .class_agnostic.classes.at("filled")
                .gt_segments,
            materials);
}

TEST(EvaluateSceneTest, UnmappedRelationsCounted) {
  const SceneAnnotation gt = SmallScene();
  SceneAnnotation pred = gt;
  for (Instance& inst : pred.instances) {
    if (inst.id == "beaker") inst.mask = Rect(16, 12, 9, 3, 15, 5);
  }
  const MetricReport r = Unwrap(EvaluateScene(gt, &pred, kFull));
  EXPECT_EQ(r.unmapped_pred_relations, 2);
  EXPECT_EQ(r.relations.at("linked").fn, 1);
}

SceneAnnotation Relabel(const SceneAnnotation& s, const std::string& prefix) {
  SceneAnnotation out = s;
  for (Instance& inst : out.instances) inst.id = prefix + inst.id;
  for (Relation& r : out.relations) {
    r.subject = prefix + r.subject;
    r.object = prefix + r.object;
  }
  std::reverse(out.instances.begin(), out.instances.end());
  std::reverse(out.relations.begin(), out.relations.end());
  return out;
}

SyntheticPlan NoisyPlan(int scenes, uint64_t seed) {
  SyntheticPlan plan;
  plan.scenes = scenes;
  plan.seed = seed;
  plan.width = 96;
  plan.height = 80;
  plan.link_drop = 0.2;
  plan.link_spurious = 0.2;
  for (PerturbSpec* p : {&plan.vessel, &plan.material, &plan.part}) {
    p->drop = 0.15;
    p->spurious = 0.15;
    p->flip = 0.2;
    p->morph = 2;
  }
  return plan;
}

// Relabelling ids consistently and reordering instances changes no counter.
// Only the GT side is relabelled in reverse order; greedy ties between
// identical IOUs cannot arise in generated scenes.
TEST(EvaluateSceneTest, InvariantUnderRelabeling) {
  const SyntheticDataset data = Unwrap(GenerateSynthetic(NoisyPlan(30, 5)));
  for (const SyntheticScene& scene : data.scenes) {
    const MetricReport a = Unwrap(EvaluateScene(scene.gt, &scene.pred, kFull));
    const SceneAnnotation gt = Relabel(scene.gt, "g_");
    const SceneAnnotation pred = Relabel(scene.pred, "q_");
    const MetricReport b = Unwrap(EvaluateScene(gt, &pred, kFull));
    EXPECT_EQ(a.scene.semantic, b.scene.semantic) << scene.name;
    EXPECT_EQ(a.relations, b.relations) << scene.name;
    EXPECT_EQ(a.unmapped_pred_relations, b.unmapped_pred_relations);
    for (const auto& [name, pool] : a.scene.pools) {
      for (const auto& [label, c] : pool.with_class.classes) {
        const PanopticCounts& o =
            b.scene.pools.at(name).with_class.classes.at(label);
        EXPECT_EQ(c.tp, o.tp);
        EXPECT_EQ(c.fn, o.fn);
        EXPECT_EQ(c.fp, o.fp);
        EXPECT_NEAR(c.iou_sum, o.iou_sum, 1e-12);
      }
    }
    EXPECT_EQ(a.content.units, b.content.units);
    EXPECT_EQ(a.content.semantic, b.content.semantic);
  }
}

std::vector<ScenePair> Pairs(const SyntheticDataset& data) {
  std::vector<ScenePair> pairs;
  for (const SyntheticScene& s : data.scenes) {
    pairs.push_back({s.name, &s.gt, &s.pred});
  }
  return pairs;
}

TEST(EvaluateBatchTest, EqualsFoldOfSingleScenes) {
  const SyntheticDataset data = Unwrap(GenerateSynthetic(NoisyPlan(10, 9)));
  std::vector<MetricReport> singles;
  for (const SyntheticScene& s : data.scenes) {
    singles.push_back(Unwrap(EvaluateScene(s.gt, &s.pred, kFull)));
  }
  const MetricReport folded = Unwrap(AggregateReports(singles));
  const MetricReport batch = Unwrap(EvaluateBatchSerial(Pairs(data), kFull));
  EXPECT_EQ(batch, folded);
  EXPECT_EQ(batch.scene_count, 10);
}

TEST(EvaluateBatchTest, IdenticalAcrossWorkersAndOrder) {
  const SyntheticDataset data = Unwrap(GenerateSynthetic(NoisyPlan(24, 13)));
  std::vector<ScenePair> pairs = Pairs(data);
  const std::string serial =
      SerializeReport(Unwrap(EvaluateBatchSerial(pairs, kFull)));
  std::mt19937_64 rng(1);
  for (int workers : {1, 2, 4, 8}) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    EXPECT_EQ(SerializeReport(Unwrap(EvaluateBatch(pairs, kFull, workers))),
              serial)
        << workers << " workers";
  }
}

TEST(EvaluateBatchTest, Errors) {
  const SceneAnnotation s = SmallScene();
  const std::vector<ScenePair> dup = {{"a", &s, &s}, {"a", &s, &s}};
  EXPECT_FALSE(EvaluateBatch(dup, kFull, 2).ok());
  const std::vector<ScenePair> one = {{"a", &s, &s}};
  EXPECT_FALSE(EvaluateBatch(one, kFull, 0).ok());
  SceneAnnotation small;
  small.width = small.height = 2;
  const std::vector<ScenePair> bad = {{"a", &s, &s}, {"b", &s, &small}};
  const absl::Status status = EvaluateBatch(bad, kFull, 2).status();
  EXPECT_FALSE(status.ok());
  EXPECT_NE(std::string(status.message()).find("b:"), std::string::npos);
}

}  // namespace
}  // namespace vessel_eval
