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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vessel_eval/matching.h"
#include "vessel_eval/scene_eval.h"
#include "vessel_eval/synthetic.h"

namespace vessel_eval {
namespace {

std::vector<BinaryMask> RandomBoxes(std::mt19937_64& rng, int count,
                                    int64_t side) {
  std::uniform_int_distribution<int64_t> pos(0, side - 1);
  std::vector<BinaryMask> out;
  for (int i = 0; i < count; ++i) {
    int64_t x0 = pos(rng), x1 = pos(rng), y0 = pos(rng), y1 = pos(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    std::vector<RowSpan> spans;
    for (int64_t y = y0; y <= y1; ++y) spans.push_back({y, x0, x1 + 1});
    out.push_back(*BinaryMask::FromRowSpans(side, side, spans));
  }
  return out;
}

template <bool kParallel>
void BM_IouMatrix(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const std::vector<BinaryMask> a = RandomBoxes(rng, n, 1024);
  const std::vector<BinaryMask> b = RandomBoxes(rng, n, 1024);
  std::vector<const BinaryMask*> pa, pb;
  for (const BinaryMask& m : a) pa.push_back(&m);
  for (const BinaryMask& m : b) pb.push_back(&m);
  for (auto _ : state) {
    auto m =
        kParallel ? ComputeIouMatrix(pa, pb) : ComputeIouMatrixSerial(pa, pb);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_IouMatrix<false>)->Arg(8)->Arg(20)->Arg(64);
BENCHMARK(BM_IouMatrix<true>)->Arg(8)->Arg(20)->Arg(64);

const SyntheticDataset& Dataset() {
  static const SyntheticDataset* const kData = [] {
    SyntheticPlan plan;
    plan.scenes = 50;
    plan.width = plan.height = 1024;
    for (PerturbSpec* p : {&plan.vessel, &plan.material, &plan.part}) {
      p->drop = 0.1;
      p->spurious = 0.1;
      p->flip = 0.1;
      p->morph = 4;
    }
    return new SyntheticDataset(*GenerateSynthetic(plan));
  }();
  return *kData;
}

std::vector<ScenePair> Pairs() {
  std::vector<ScenePair> pairs;
  for (const SyntheticScene& s : Dataset().scenes) {
    pairs.push_back({s.name, &s.gt, &s.pred});
  }
  return pairs;
}

void BM_EvaluateBatchSerial(benchmark::State& state) {
  const std::vector<ScenePair> pairs = Pairs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluateBatchSerial(pairs, EvalConfig{}));
  }
  state.SetItemsProcessed(state.iterations() * pairs.size());
}
BENCHMARK(BM_EvaluateBatchSerial)->Unit(benchmark::kMillisecond);

void BM_EvaluateBatch(benchmark::State& state) {
  const std::vector<ScenePair> pairs = Pairs();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EvaluateBatch(pairs, EvalConfig{}, workers));
  }
  state.SetItemsProcessed(state.iterations() * pairs.size());
}
BENCHMARK(BM_EvaluateBatch)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace vessel_eval

BENCHMARK_MAIN();
