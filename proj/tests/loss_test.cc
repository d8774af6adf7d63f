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

#include "vessel_eval/loss.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "test_util.h"
#include "vessel_eval/hungarian.h"

namespace vessel_eval {
namespace {

using ::vessel_eval::testing::BruteForceMinCost;
using ::vessel_eval::testing::RandomMask;
using ::vessel_eval::testing::Rect;
using ::vessel_eval::testing::Unwrap;

constexpr int64_t kSide = 8;

LogitPair RandomLogits(std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> v(-range, range);
  LogitPair pair{kSide, kSide, {}, {}};
  for (int64_t i = 0; i < kSide * kSide; ++i) {
    pair.yes.push_back(v(rng));
    pair.no.push_back(v(rng));
  }
  return pair;
}

// Logits whose argmax reproduces `mask`, with random margins and offsets.
LogitPair NoisyRendering(std::mt19937_64& rng, const BinaryMask& mask) {
  std::uniform_real_distribution<double> margin(0.2, 4.0);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  const std::vector<uint8_t> bits = mask.Decode();
  LogitPair pair{mask.width(), mask.height(), {}, {}};
  for (uint8_t b : bits) {
    const double base = offset(rng);
    pair.no.push_back(base);
    pair.yes.push_back(base + (b ? margin(rng) : -margin(rng)));
  }
  return pair;
}

// Mean binary cross-entropy computed directly from the logits.
double DirectCrossEntropy(const LogitPair& pair, const BinaryMask& gt) {
  const std::vector<uint8_t> g = gt.Decode();
  double sum = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    double p = 1.0 / (1.0 + std::exp(pair.no[i] - pair.yes[i]));
    p = std::min(std::max(p, 1e-7), 1.0 - 1e-7);
    sum -= g[i] ? std::log(p) : std::log(1.0 - p);
  }
  return sum / static_cast<double>(g.size());
}

double PairLoss(const LogitPair& pair, const BinaryMask& gt) {
  return Unwrap(PixelCrossEntropy(Unwrap(SoftmaxPair(pair)), gt));
}

TEST(SoftmaxPairTest, ComplementsSumToOne) {
  std::mt19937_64 rng(3);
  for (double range : {1.0, 50.0, 1000.0}) {
    const LogitPair pair = RandomLogits(rng, range);
    const LogitPair swapped{pair.width, pair.height, pair.no, pair.yes};
    const ProbabilityMap p = Unwrap(SoftmaxPair(pair));
    const ProbabilityMap q = Unwrap(SoftmaxPair(swapped));
    for (size_t i = 0; i < p.values.size(); ++i) {
      ASSERT_TRUE(std::isfinite(p.values[i]));
      EXPECT_GE(p.values[i], 0.0);
      EXPECT_LE(p.values[i], 1.0);
      EXPECT_NEAR(p.values[i] + q.values[i], 1.0, 1e-12);
    }
  }
}

TEST(SoftmaxPairTest, ExtremeDifferences) {
  LogitPair pair{2, 2, {1000.0, -1000.0, 500.0, 0.0}, {0.0, 0.0, -500.0, 0.0}};
  const ProbabilityMap p = Unwrap(SoftmaxPair(pair));
  EXPECT_EQ(p.values[0], 1.0);
  EXPECT_EQ(p.values[1], 0.0);
  EXPECT_EQ(p.values[2], 1.0);
  EXPECT_EQ(p.values[3], 0.5);
}

TEST(SoftmaxPairTest, RejectsMalformedMaps) {
  EXPECT_FALSE(SoftmaxPair(LogitPair{2, 2, {0, 0, 0}, {0, 0, 0, 0}}).ok());
  EXPECT_FALSE(SoftmaxPair(LogitPair{0, 2, {}, {}}).ok());
  EXPECT_FALSE(SoftmaxPair(LogitPair{1, 1, {NAN}, {0}}).ok());
}

TEST(CrossEntropyTest, ClampsSaturatedProbabilities) {
  const BinaryMask full = BinaryMask::Full(2, 1);
  const LogitPair wrong{2, 1, {-1000.0, -1000.0}, {0.0, 0.0}};
  EXPECT_NEAR(PairLoss(wrong, full), -std::log(1e-7), 1e-9);
  const LogitPair right{2, 1, {1000.0, 1000.0}, {0.0, 0.0}};
  EXPECT_NEAR(PairLoss(right, full), -std::log(1.0 - 1e-7), 1e-12);
}

TEST(CrossEntropyTest, RejectsSizeMismatch) {
  const ProbabilityMap p{2, 2, {0.5, 0.5, 0.5, 0.5}};
  EXPECT_FALSE(PixelCrossEntropy(p, BinaryMask::Empty(3, 2)).ok());
}

TEST(CrossEntropyGradientTest, MatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  constexpr double kH = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const LogitPair pair = RandomLogits(rng, 3.0);
    const BinaryMask gt = RandomMask(rng, kSide, kSide);
    const LogitGradient grad = Unwrap(CrossEntropyGradient(pair, gt));
    for (int which = 0; which < 2; ++which) {
      const std::vector<double>& analytic = which == 0 ? grad.yes : grad.no;
      for (size_t i = 0; i < analytic.size(); ++i) {
        LogitPair plus = pair, minus = pair;
        (which == 0 ? plus.yes : plus.no)[i] += kH;
        (which == 0 ? minus.yes : minus.no)[i] -= kH;
        const double numeric =
            (PairLoss(plus, gt) - PairLoss(minus, gt)) / (2 * kH);
        const double scale = std::max(std::abs(numeric), std::abs(analytic[i]));
        ASSERT_LT(std::abs(numeric - analytic[i]) / scale, 1e-4)
            << "trial " << trial << " pixel " << i;
      }
    }
  }
}

TEST(SemanticLossTest, MeanOverClasses) {
  std::mt19937_64 rng(5);
  std::map<std::string, LogitPair> preds;
  std::map<std::string, BinaryMask> gts;
  double expected = 0.0;
  for (const char* label : {"liquid", "solid", "foam"}) {
    preds[label] = RandomLogits(rng, 4.0);
    gts[label] = RandomMask(rng, kSide, kSide);
    expected += DirectCrossEntropy(preds[label], gts[label]);
  }
  EXPECT_NEAR(Unwrap(SemanticLoss(preds, gts)), expected / 3, 1e-12);

  auto missing_gt = gts;
  missing_gt.erase("foam");
  EXPECT_EQ(SemanticLoss(preds, missing_gt).status().code(),
            absl::StatusCode::kNotFound);
  auto missing_pred = preds;
  missing_pred.erase("solid");
  EXPECT_EQ(SemanticLoss(missing_pred, gts).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_FALSE(SemanticLoss({}, {}).ok());
}

std::vector<BinaryMask> Padded(const std::vector<BinaryMask>& gts, int n) {
  std::vector<BinaryMask> out = gts;
  while (static_cast<int>(out.size()) < n) {
    out.push_back(BinaryMask::Empty(kSide, kSide));
  }
  return out;
}

// Minimum mean cross-entropy over every slot-to-GT permutation.
double ExhaustiveMinimum(const std::vector<LogitPair>& slots,
                         const std::vector<BinaryMask>& gts) {
  const int n = static_cast<int>(slots.size());
  const std::vector<BinaryMask> padded = Padded(gts, n);
  DenseMatrix ce(n, n);
  for (int s = 0; s < n; ++s) {
    for (int g = 0; g < n; ++g)
      ce(s, g) = DirectCrossEntropy(slots[s], padded[g]);
  }
  return BruteForceMinCost(ce) / n;
}

struct LossCase {
  std::vector<LogitPair> slots;
  std::vector<BinaryMask> gts;
};

// Slots are noisy renderings of a shuffled, padded GT set.
LossCase RenderedCase(std::mt19937_64& rng) {
  LossCase c;
  const int n = std::uniform_int_distribution<int>(1, 6)(rng);
  const int k = std::uniform_int_distribution<int>(0, n)(rng);
  for (int i = 0; i < k; ++i) {
    BinaryMask m = RandomMask(rng, kSide, kSide);
    while (m.Area() == 0) m = RandomMask(rng, kSide, kSide);
    c.gts.push_back(std::move(m));
  }
  std::vector<BinaryMask> targets = Padded(c.gts, n);
  std::shuffle(targets.begin(), targets.end(), rng);
  for (const BinaryMask& t : targets) c.slots.push_back(NoisyRendering(rng, t));
  return c;
}

TEST(InstanceLossTest, EqualsExhaustiveMinimumOnRenderedSlots) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const LossCase c = RenderedCase(rng);
    const int n = static_cast<int>(c.slots.size());
    const InstanceLossResult r = Unwrap(InstanceLoss(c.slots, c.gts, n));
    ASSERT_NEAR(r.loss, ExhaustiveMinimum(c.slots, c.gts), 1e-10)
        << "trial " << trial;
  }
}

TEST(InstanceLossTest, AssignmentMinimizesIouCost) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    const int k = std::uniform_int_distribution<int>(0, n)(rng);
    std::vector<LogitPair> slots;
    std::vector<BinaryMask> binary;
    for (int s = 0; s < n; ++s) {
      slots.push_back(RandomLogits(rng, 2.0));
      std::vector<uint8_t> bits;
      for (int64_t i = 0; i < kSide * kSide; ++i) {
        bits.push_back(slots.back().yes[i] >= slots.back().no[i]);
      }
      binary.push_back(Unwrap(BinaryMask::Encode(bits, kSide, kSide)));
    }
    std::vector<BinaryMask> gts;
    for (int g = 0; g < k; ++g) gts.push_back(RandomMask(rng, kSide, kSide));
    const std::vector<BinaryMask> padded = Padded(gts, n);
    DenseMatrix cost(n, n);
    for (int s = 0; s < n; ++s) {
      for (int g = 0; g < n; ++g) {
        cost(s, g) = 1.0 - Unwrap(Iou(binary[s], padded[g])).value_or(1.0);
      }
    }
    const InstanceLossResult r = Unwrap(InstanceLoss(slots, gts, n));
    double chosen = 0.0;
    std::vector<int> used(static_cast<size_t>(n), 0);
    int empties = 0;
    for (int s = 0; s < n; ++s) {
      const int g = r.gt_for_slot[s];
      if (g < 0) {
        // Any padding column: empty masks are interchangeable.
        chosen += cost(s, k);
        ++empties;
      } else {
        chosen += cost(s, g);
        ++used[g];
      }
    }
    EXPECT_EQ(empties, n - k);
    for (int g = 0; g < k; ++g) EXPECT_EQ(used[g], 1);
    EXPECT_NEAR(chosen, BruteForceMinCost(cost), 1e-12) << "trial " << trial;
  }
}

TEST(InstanceLossTest, InvariantUnderPermutation) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    LossCase c = RenderedCase(rng);
    const int n = static_cast<int>(c.slots.size());
    const double loss = Unwrap(InstanceLoss(c.slots, c.gts, n)).loss;
    std::shuffle(c.slots.begin(), c.slots.end(), rng);
    std::shuffle(c.gts.begin(), c.gts.end(), rng);
    EXPECT_NEAR(Unwrap(InstanceLoss(c.slots, c.gts, n)).loss, loss, 1e-10);
  }
}

TEST(InstanceLossTest, PerfectSlotsAndPadding) {
  const BinaryMask a = Rect(kSide, kSide, 0, 0, 4, 4);
  const BinaryMask b = Rect(kSide, kSide, 4, 4, 8, 8);
  std::vector<LogitPair> slots;
  for (const BinaryMask& m : {BinaryMask::Empty(kSide, kSide), b, a}) {
    LogitPair p{kSide, kSide, {}, {}};
    for (uint8_t bit : m.Decode()) {
      p.yes.push_back(bit ? 100.0 : -100.0);
      p.no.push_back(0.0);
    }
    slots.push_back(std::move(p));
  }
  const std::vector<BinaryMask> gts = {a, b};
  const InstanceLossResult r = Unwrap(InstanceLoss(slots, gts, 3));
  EXPECT_EQ(r.gt_for_slot, (std::vector<int>{-1, 1, 0}));
  EXPECT_NEAR(r.loss, -std::log(1.0 - 1e-7), 1e-12);
}

TEST(InstanceLossTest, RejectsBadSlotCounts) {
  std::mt19937_64 rng(1);
  std::vector<LogitPair> slots = {RandomLogits(rng, 1.0),
                                  RandomLogits(rng, 1.0)};
  std::vector<BinaryMask> gts = {RandomMask(rng, kSide, kSide)};
  EXPECT_FALSE(InstanceLoss(slots, gts).ok());
  EXPECT_FALSE(InstanceLoss(slots, gts, 3).ok());
  EXPECT_FALSE(InstanceLoss(slots, gts, 0).ok());
  std::vector<BinaryMask> too_many(3, BinaryMask::Full(kSide, kSide));
  EXPECT_FALSE(InstanceLoss(slots, too_many, 2).ok());
  EXPECT_EQ(slots.size(), 2u);
  EXPECT_EQ(Unwrap(InstanceLoss(slots, gts, 2)).gt_for_slot.size(), 2u);
}

}  // namespace
}  // namespace vessel_eval
