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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_util.h"
#include "vessel_eval/commands.h"
#include "vessel_eval/hungarian.h"
#include "vessel_eval/loss.h"
#include "vessel_eval/mask.h"
#include "vessel_eval/metrics.h"
#include "vessel_eval/report_io.h"
#include "vessel_eval/scene_eval.h"
#include "vessel_eval/scene_io.h"
#include "vessel_eval/synthetic.h"

namespace vessel_eval {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ::vessel_eval::testing::BruteForceMinCost;
using ::vessel_eval::testing::RandomMask;
using ::vessel_eval::testing::Unwrap;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message of a criterion.
class Check {
 public:
  void Expect(bool condition, const std::string& what) {
    if (!condition && pass_) {
      pass_ = false;
      first_failure_ = what;
    }
  }
  Outcome Result(const std::string& detail) const {
    return {pass_, pass_ ? detail : first_failure_};
  }

 private:
  bool pass_ = true;
  std::string first_failure_;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string Fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

fs::path ScratchDir(const std::string& name) {
  const fs::path dir =
      fs::temp_directory_path() / "vessel_eval_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<ScenePair> Pairs(const SyntheticDataset& data) {
  std::vector<ScenePair> pairs;
  for (const SyntheticScene& s : data.scenes) {
    pairs.push_back({s.name, &s.gt, &s.pred});
  }
  return pairs;
}

// ---------------------------------------------------------------------------

Outcome WorkedExample() {
  const auto start = std::chrono::steady_clock::now();
  const std::map<std::string, double> split = Unwrap(SplitFalsePositives(
      1200, {{"liquid", 0.5}, {"solid", 0.2}, {"foam", 0.3}}));
  const double elapsed = Seconds(start);
  Check check;
  check.Expect(split.at("solid") == 240.0,
               "solid share is " + Fmt("%.17g", split.at("solid")));
  check.Expect(elapsed < 1e-3, "took " + Fmt("%.6f", elapsed) + " s");
  return check.Result("1200 x 0.2 = " + Fmt("%.1f", split.at("solid")) +
                      " in " + Fmt("%.1f", elapsed * 1e6) + " us");
}

void ExpectPerfectTable(const PanopticTable& table, const std::string& where,
                        Check* check) {
  for (const auto& [label, c] : table.classes) {
    if (c.gt_segments == 0) continue;
    const PanopticScores s = ScorePanoptic(c);
    for (const Ratio& r : {s.pq, s.sq, s.rq}) {
      check->Expect(r.has_value() && std::abs(*r - 1.0) <= 1e-12,
                    where + "/" + label + " is not perfect");
    }
  }
}

void ExpectPerfectScope(const ScopeReport& scope, const std::string& where,
                        Check* check) {
  for (const auto& [label, c] : scope.semantic) {
    if (c.gt_px == 0) continue;
    const SemanticScores s = ScoreSemantic(c);
    for (const Ratio& r : {s.iou, s.precision, s.recall}) {
      check->Expect(r.has_value() && std::abs(*r - 1.0) <= 1e-12,
                    where + " semantic " + label + " is not perfect");
    }
  }
  for (const auto& [label, metrics] : scope.semantic_macro) {
    for (const auto& [metric, stat] : metrics) {
      if (stat.support == 0) continue;
      check->Expect(std::abs(*stat.Mean() - 1.0) <= 1e-12,
                    where + " per-vessel " + label + "/" + metric);
    }
  }
  for (const auto& [name, pool] : scope.pools) {
    ExpectPerfectTable(pool.with_class, where + " " + name + " with_class",
                       check);
    ExpectPerfectTable(pool.class_agnostic,
                       where + " " + name + " class_agnostic", check);
    for (const MacroTable* macro :
         {&pool.with_class_macro, &pool.class_agnostic_macro}) {
      for (const auto& [label, metrics] : *macro) {
        for (const auto& [metric, stat] : metrics) {
          if (stat.support == 0) continue;
          check->Expect(std::abs(*stat.Mean() - 1.0) <= 1e-12,
                        where + " " + name + " per-vessel " + label);
        }
      }
    }
  }
}

Outcome IdentitySuite() {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  int scenes = 0;
  int64_t classes = 0;
  for (uint64_t seed = 1; scenes < 200; ++seed) {
    SyntheticPlan plan;
    plan.scenes = 10;
    plan.seed = seed;
    plan.parts = {0, 2};
    plan.link = 0.5;
    plan.nested = seed % 2 == 0;
    plan.overlap = seed % 3 == 0;
    const SyntheticDataset data = Unwrap(GenerateSynthetic(plan));
    std::vector<ScenePair> pairs;
    for (const SyntheticScene& s : data.scenes) {
      pairs.push_back({s.name, &s.gt, &s.gt});
      ++scenes;
    }
    const MetricReport report =
        Unwrap(EvaluateBatchSerial(pairs, EvalConfig{}));
    ExpectPerfectScope(report.scene, "scene", &check);
    ExpectPerfectScope(report.content, "content", &check);
    for (const auto& [name, c] : report.relations) {
      if (c.tp + c.fn == 0) continue;
      const RelationScores s = ScoreRelation(c);
      for (const Ratio& r : {s.precision, s.recall, s.iou}) {
        check.Expect(r.has_value() && std::abs(*r - 1.0) <= 1e-12,
                     "relation " + name + " is not perfect");
      }
    }
    for (const auto& [name, pool] : report.scene.pools) {
      classes += static_cast<int64_t>(pool.with_class.classes.size());
    }
  }
  const double elapsed = Seconds(start);
  check.Expect(elapsed < 10.0, "took " + Fmt("%.2f", elapsed) + " s");
  return check.Result(std::to_string(scenes) + " scenes, " +
                      std::to_string(classes) + " class tables, " +
                      Fmt("%.2f", elapsed) + " s");
}

Outcome MatchingOracle() {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    DenseMatrix cost(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) cost(r, c) = value(rng);
    }
    const Assignment a = Unwrap(HungarianAssign(cost));
    check.Expect(a.total_cost == BruteForceMinCost(cost),
                 "trial " + std::to_string(trial) + " differs");
  }
  const double elapsed = Seconds(start);
  check.Expect(elapsed < 5.0, "took " + Fmt("%.2f", elapsed) + " s");
  return check.Result("1000 matrices, exact, " + Fmt("%.2f", elapsed) + " s");
}

SyntheticPlan PerturbedPlan(int scenes, uint64_t seed) {
  SyntheticPlan plan;
  plan.scenes = scenes;
  plan.seed = seed;
  plan.parts = {0, 2};
  plan.link = 0.5;
  plan.link_drop = 0.3;
  plan.link_spurious = 0.2;
  plan.nested = true;
  for (PerturbSpec* p : {&plan.vessel, &plan.material, &plan.part}) {
    p->drop = 0.15;
    p->spurious = 0.25;
    p->flip = 0.25;
    p->morph = 3;
  }
  return plan;
}

// Criterion 4 and 5 share the evaluated sets.
struct EvaluatedSet {
  std::string name;
  MetricReport report;
};
std::vector<EvaluatedSet>* const kEvaluatedSets =
    new std::vector<EvaluatedSet>();

Outcome CountingOracle() {
  Check check;
  const fs::path dir = ScratchDir("counting");
  const SyntheticPlan plan = PerturbedPlan(100, 4242);
  json plan_doc = {{"scenes", plan.scenes},
                   {"seed", plan.seed},
                   {"parts", {plan.parts.min, plan.parts.max}},
                   {"link", plan.link},
                   {"link_drop", plan.link_drop},
                   {"link_spurious", plan.link_spurious},
                   {"nested", plan.nested},
                   {"perturb", json::object()}};
  for (const auto& [kind, spec] : {std::pair{"vessel", &plan.vessel},
                                   {"material", &plan.material},
                                   {"part", &plan.part}}) {
    plan_doc["perturb"][kind] = {{"drop", spec->drop},
                                 {"spurious", spec->spurious},
                                 {"flip", spec->flip},
                                 {"morph", spec->morph}};
  }
  if (!WriteFile((dir / "plan.json").string(), plan_doc.dump()).ok()) {
    return {false, "cannot write plan"};
  }
  std::ostringstream out, err;
  if (RunGenerate((dir / "plan.json").string(), (dir / "data").string(), out,
                  err) != kExitOk) {
    return {false, "generate failed: " + err.str()};
  }
  EvaluateOptions options;
  options.gt_dir = (dir / "data" / "gt").string();
  options.pred_dir = (dir / "data" / "pred").string();
  options.relations = true;
  options.per_vessel = true;
  options.out_dir = (dir / "eval").string();
  if (RunEvaluate(options, out, err) != kExitOk) {
    return {false, "evaluate failed: " + err.str()};
  }
  const MetricReport report = Unwrap(
      ParseReport(Unwrap(ReadFile((dir / "eval" / "metrics.json").string()))));
  const ExpectedCounters expected = Unwrap(ParseExpected(
      Unwrap(ReadFile((dir / "data" / "expected.json").string()))));
  kEvaluatedSets->push_back({"cli set", report});

  check.Expect(report.scene_count == expected.scene_count, "scene count");
  int64_t compared = 0;
  for (const char* pool : {kPoolVessel, kPoolMaterial, kPoolPart}) {
    const PoolReport empty;
    auto e = expected.pools.find(pool);
    auto r = report.scene.pools.find(pool);
    const PoolReport& want = e == expected.pools.end() ? empty : e->second;
    const PoolReport& got = r == report.scene.pools.end() ? empty : r->second;
    for (const auto& [mode, pair] :
         {std::pair{"with_class", std::pair{&got.with_class, &want.with_class}},
          {"class_agnostic",
           std::pair{&got.class_agnostic, &want.class_agnostic}}}) {
      check.Expect(*pair.first == *pair.second,
                   std::string(pool) + " " + mode + " counters differ");
      compared += static_cast<int64_t>(pair.second->classes.size());
    }
  }
  check.Expect(report.relations == expected.relations, "relation counters");
  check.Expect(
      report.unmapped_pred_relations == expected.unmapped_pred_relations,
      "unmapped relation count");

  // Reported RQ against the counting formula, read from the metrics file.
  const json doc =
      json::parse(Unwrap(ReadFile((dir / "eval" / "metrics.json").string())));
  int64_t rq_checked = 0;
  for (const auto& [pool, p] : doc["scene"]["pools"].items()) {
    for (const char* mode : {"with_class", "class_agnostic"}) {
      for (const auto& [label, c] : p[mode]["classes"].items()) {
        const double tp = c["tp"].get<double>();
        const double fp = c["fp"].get<double>();
        const double fn = c["fn"].get<double>();
        if (tp + fp + fn == 0) continue;
        const double rq = tp / (tp + 0.5 * (fp + fn));
        check.Expect(std::abs(c["rq"].get<double>() - rq) <= 1e-12,
                     pool + "/" + label + " rq");
        ++rq_checked;
      }
    }
  }
  return check.Result(std::to_string(compared) + " class counters and " +
                      std::to_string(rq_checked) + " RQ values over " +
                      std::to_string(report.scene_count) + " scenes");
}

Outcome ClassAgnosticConsistency() {
  Check check;
  // Per-scene reports of a second perturbed dataset join the CLI set.
  const SyntheticDataset data =
      Unwrap(GenerateSynthetic(PerturbedPlan(40, 99)));
  for (const SyntheticScene& s : data.scenes) {
    kEvaluatedSets->push_back(
        {s.name, Unwrap(EvaluateScene(s.gt, &s.pred, EvalConfig{}))});
  }
  kEvaluatedSets->push_back(
      {"batch", Unwrap(EvaluateBatchSerial(Pairs(data), EvalConfig{}))});

  int64_t tables = 0;
  int64_t without_gt = 0;
  for (const EvaluatedSet& set : *kEvaluatedSets) {
    for (const auto& [scope_name, scope] :
         {std::pair{"scene", &set.report.scene},
          {"content", &set.report.content}}) {
      for (const auto& [pool_name, pool] : scope->pools) {
        const PanopticTable& t = pool.class_agnostic;
        double sum = 0.0;
        for (const auto& [label, c] : t.classes) sum += c.fp;
        if (t.TotalGtLabels() == 0) {
          // No GT class shares to split by.
          ++without_gt;
          check.Expect(sum == 0.0, set.name + " assigns FP without GT");
          continue;
        }
        check.Expect(std::abs(sum - static_cast<double>(
                                        t.unmatched_predictions)) <= 1e-9,
                     set.name + " " + scope_name + " " + pool_name +
                         ": FP sum " + Fmt("%.12g", sum) + " vs " +
                         std::to_string(t.unmatched_predictions));
        ++tables;
      }
    }
  }
  return check.Result(std::to_string(tables) + " tables over " +
                      std::to_string(kEvaluatedSets->size()) +
                      " evaluated sets (" + std::to_string(without_gt) +
                      " without GT labels)");
}

double LossOf(const LogitPair& pair, const BinaryMask& gt) {
  return Unwrap(PixelCrossEntropy(Unwrap(SoftmaxPair(pair)), gt));
}

LogitPair RandomLogits(std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> v(-range, range);
  LogitPair pair{8, 8, {}, {}};
  for (int i = 0; i < 64; ++i) {
    pair.yes.push_back(v(rng));
    pair.no.push_back(v(rng));
  }
  return pair;
}

Outcome GradientCheck() {
  Check check;
  std::mt19937_64 rng(606);
  constexpr double kH = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const LogitPair pair = RandomLogits(rng, 3.0);
    const BinaryMask gt = RandomMask(rng, 8, 8);
    const LogitGradient grad = Unwrap(CrossEntropyGradient(pair, gt));
    for (int which = 0; which < 2; ++which) {
      const std::vector<double>& analytic = which == 0 ? grad.yes : grad.no;
      for (size_t i = 0; i < analytic.size(); ++i) {
        LogitPair plus = pair, minus = pair;
        (which == 0 ? plus.yes : plus.no)[i] += kH;
        (which == 0 ? minus.yes : minus.no)[i] -= kH;
        const double numeric =
            (LossOf(plus, gt) - LossOf(minus, gt)) / (2 * kH);
        const double rel = std::abs(numeric - analytic[i]) /
                           std::max(std::abs(numeric), std::abs(analytic[i]));
        worst = std::max(worst, rel);
      }
    }
  }
  check.Expect(worst < 1e-4, "relative error " + Fmt("%.3g", worst));
  return check.Result("50 pairs, worst relative error " + Fmt("%.3g", worst));
}

Outcome SoftmaxNormalization() {
  Check check;
  std::mt19937_64 rng(707);
  double worst = 0.0;
  std::vector<LogitPair> cases = {RandomLogits(rng, 1.0),
                                  RandomLogits(rng, 100.0)};
  LogitPair extreme{
      4, 1, {1000.0, -1000.0, 0.0, 1e3}, {0.0, 0.0, 1000.0, -1e3}};
  cases.push_back(extreme);
  for (const LogitPair& pair : cases) {
    const LogitPair swapped{pair.width, pair.height, pair.no, pair.yes};
    const ProbabilityMap p = Unwrap(SoftmaxPair(pair));
    const ProbabilityMap q = Unwrap(SoftmaxPair(swapped));
    for (size_t i = 0; i < p.values.size(); ++i) {
      check.Expect(std::isfinite(p.values[i]) && std::isfinite(q.values[i]),
                   "non-finite probability");
      worst = std::max(worst, std::abs(p.values[i] + q.values[i] - 1.0));
    }
  }
  check.Expect(worst <= 1e-12, "deviation " + Fmt("%.3g", worst));
  return check.Result("max |p + q - 1| = " + Fmt("%.3g", worst) +
                      " incl. |yes - no| = 1000");
}

double CrossEntropyDirect(const LogitPair& pair, const BinaryMask& gt) {
  const std::vector<uint8_t> g = gt.Decode();
  double sum = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    double p = 1.0 / (1.0 + std::exp(pair.no[i] - pair.yes[i]));
    p = std::clamp(p, 1e-7, 1.0 - 1e-7);
    sum -= g[i] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(g.size());
}

Outcome InstanceLossOptimality() {
  Check check;
  std::mt19937_64 rng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const int k = std::uniform_int_distribution<int>(0, n)(rng);
    std::vector<BinaryMask> gts;
    for (int i = 0; i < k; ++i) {
      BinaryMask m = RandomMask(rng, 8, 8);
      while (m.Area() == 0) m = RandomMask(rng, 8, 8);
      gts.push_back(std::move(m));
    }
    std::vector<BinaryMask> padded = gts;
    while (static_cast<int>(padded.size()) < n) {
      padded.push_back(BinaryMask::Empty(8, 8));
    }
    // Slots are noisy renderings of the shuffled, padded GT set.
    std::vector<BinaryMask> targets = padded;
    std::shuffle(targets.begin(), targets.end(), rng);
    std::uniform_real_distribution<double> margin(0.2, 4.0);
    std::uniform_real_distribution<double> offset(-2.0, 2.0);
    std::vector<LogitPair> slots;
    for (const BinaryMask& t : targets) {
      LogitPair pair{8, 8, {}, {}};
      for (uint8_t b : t.Decode()) {
        const double base = offset(rng);
        pair.no.push_back(base);
        pair.yes.push_back(base + (b ? margin(rng) : -margin(rng)));
      }
      slots.push_back(std::move(pair));
    }
    DenseMatrix ce(n, n);
    for (int s = 0; s < n; ++s) {
      for (int g = 0; g < n; ++g) {
        ce(s, g) = CrossEntropyDirect(slots[s], padded[g]);
      }
    }
    const double oracle = BruteForceMinCost(ce) / n;
    const double loss = Unwrap(InstanceLoss(slots, gts, n)).loss;
    worst = std::max(worst, std::abs(loss - oracle));
    std::shuffle(slots.begin(), slots.end(), rng);
    std::shuffle(gts.begin(), gts.end(), rng);
    const double permuted = Unwrap(InstanceLoss(slots, gts, n)).loss;
    worst = std::max(worst, std::abs(permuted - oracle));
  }
  check.Expect(worst <= 1e-10, "deviation " + Fmt("%.3g", worst));
  return check.Result("100 cases, max deviation " + Fmt("%.3g", worst));
}

Outcome HierarchySemantics() {
  Check check;
  SyntheticPlan plan;
  plan.scenes = 1;
  plan.nested = true;
  const SyntheticDataset data = Unwrap(GenerateSynthetic(plan));
  const SceneAnnotation& scene = data.scenes.front().gt;
  const std::set<std::string> tube = Unwrap(DirectContentOf(scene, "v00"));
  const std::set<std::string> pipette =
      Unwrap(DirectContentOf(scene, "v00_pipette"));
  check.Expect(tube == std::set<std::string>{"v00_pipette"},
               "tube content is wrong");
  check.Expect(pipette == std::set<std::string>{"v00_pipette_m0"},
               "pipette content is wrong");
  return check.Result("tube -> {v00_pipette}, pipette -> {v00_pipette_m0}");
}

Outcome DeterminismAndRoundTrips() {
  Check check;
  std::mt19937_64 rng(909);
  for (int i = 0; i < 1000; ++i) {
    const int64_t w = std::uniform_int_distribution<int64_t>(1, 64)(rng);
    const int64_t h = std::uniform_int_distribution<int64_t>(1, 64)(rng);
    const BinaryMask m = RandomMask(rng, w, h);
    const std::vector<uint8_t> bits = m.Decode();
    const BinaryMask again = Unwrap(BinaryMask::Encode(bits, w, h));
    check.Expect(again == m && again.Decode() == bits, "RLE round-trip");
  }
  int scenes = 0;
  for (uint64_t seed = 1; scenes < 1000; ++seed) {
    SyntheticPlan plan = PerturbedPlan(25, seed);
    plan.width = plan.height = 128;
    plan.nested = seed % 2 == 0;
    const SyntheticDataset data = Unwrap(GenerateSynthetic(plan));
    for (const SyntheticScene& s : data.scenes) {
      for (const SceneAnnotation* scene : {&s.gt, &s.pred}) {
        if (scenes == 1000) break;
        const std::string doc = SerializeScene(*scene);
        SceneAnnotation normalized = *scene;
        normalized.Normalize();
        const SceneAnnotation parsed = Unwrap(ParseScene(doc));
        check.Expect(parsed == normalized && SerializeScene(parsed) == doc,
                     "scene round-trip of " + s.name);
        ++scenes;
      }
    }
  }
  const SyntheticDataset data =
      Unwrap(GenerateSynthetic(PerturbedPlan(60, 31337)));
  std::vector<ScenePair> pairs = Pairs(data);
  std::string reference;
  for (int workers : {1, 4, 8}) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const std::string bytes =
        SerializeReport(Unwrap(EvaluateBatch(pairs, EvalConfig{}, workers)));
    if (reference.empty()) reference = bytes;
    check.Expect(bytes == reference,
                 std::to_string(workers) + " workers changed the output");
  }
  return check.Result(
      "1000 masks, 1000 scenes, identical output for 1/4/8 workers");
}

Outcome Performance() {
  Check check;
  SyntheticPlan plan;
  plan.scenes = 300;
  plan.width = plan.height = 1024;
  plan.seed = 2026;
  plan.vessels = {1, 4};
  plan.materials = {1, 3};
  plan.parts = {0, 1};
  plan.link = 0.5;
  for (PerturbSpec* p : {&plan.vessel, &plan.material, &plan.part}) {
    p->drop = 0.1;
    p->flip = 0.1;
    p->morph = 4;
  }
  const SyntheticDataset data = Unwrap(GenerateSynthetic(plan));
  size_t most = 0;
  for (const SyntheticScene& s : data.scenes) {
    most = std::max({most, s.gt.instances.size(), s.pred.instances.size()});
  }
  check.Expect(most <= 20, "scene with " + std::to_string(most) + " instances");
  const fs::path dir = ScratchDir("performance");
  for (const SyntheticScene& s : data.scenes) {
    fs::create_directories(dir / "gt");
    fs::create_directories(dir / "pred");
    check.Expect(
        WriteFile((dir / "gt" / s.name).string(), SerializeScene(s.gt)).ok() &&
            WriteFile((dir / "pred" / s.name).string(), SerializeScene(s.pred))
                .ok(),
        "cannot write " + s.name);
  }
  EvaluateOptions options;
  options.gt_dir = (dir / "gt").string();
  options.pred_dir = (dir / "pred").string();
  options.per_vessel = true;
  options.relations = true;
  options.workers = 1;
  options.out_dir = (dir / "eval").string();
  std::ostringstream out, err;
  const auto start = std::chrono::steady_clock::now();
  const int code = RunEvaluate(options, out, err);
  const double elapsed = Seconds(start);
  check.Expect(code == kExitOk, "evaluate failed: " + err.str());
  check.Expect(elapsed < 5.0, "took " + Fmt("%.2f", elapsed) + " s");
  return check.Result("300 scenes of 1024x1024, <= " + std::to_string(most) +
                      " instances, 1 worker, " + Fmt("%.2f", elapsed) + " s");
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

int Main() {
  const std::vector<Criterion> criteria = {
      {"worked FP split example", WorkedExample},
      {"identity suite", IdentitySuite},
      {"assignment matches brute force", MatchingOracle},
      {"PQ counters match generator", CountingOracle},
      {"class-agnostic FP sums to unmatched count", ClassAgnosticConsistency},
      {"gradient matches finite differences", GradientCheck},
      {"softmax pair normalization", SoftmaxNormalization},
      {"instance loss optimality", InstanceLossOptimality},
      {"direct content hierarchy", HierarchySemantics},
      {"determinism and round-trips", DeterminismAndRoundTrips},
      {"performance target", Performance},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s  %2zu  %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace vessel_eval

int main() { return vessel_eval::Main(); }
