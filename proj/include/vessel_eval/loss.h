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

// Reference implementations of the segmentation training losses. All
// reductions are means: over pixels, then classes or slots.

#ifndef VESSEL_EVAL_LOSS_H_
#define VESSEL_EVAL_LOSS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "vessel_eval/mask.h"

namespace vessel_eval {

// Log-argument clamp: probabilities are limited to [kLossEpsilon,
// 1 - kLossEpsilon] before taking logarithms.
inline constexpr double kLossEpsilon = 1e-7;

inline constexpr int kDefaultInstanceSlots = 10;

// Row-major per-pixel probabilities in [0, 1].
struct ProbabilityMap {
  int64_t width = 0;
  int64_t height = 0;
  std::vector<double> values;
};

// The two logit maps of one class or slot: "pixel is in" and "is not in".
struct LogitPair {
  int64_t width = 0;
  int64_t height = 0;
  std::vector<double> yes;
  std::vector<double> no;
};

absl::Status ValidateLogitPair(const LogitPair& pair);

// p = e^yes / (e^yes + e^no), evaluated without overflow for any finite
// logits. Fails on non-finite input or inconsistent sizes.
absl::StatusOr<ProbabilityMap> SoftmaxPair(const LogitPair& pair);

// Mean over pixels of -[g ln p + (1 - g) ln(1 - p)] with p clamped.
absl::StatusOr<double> PixelCrossEntropy(const ProbabilityMap& p,
                                         const BinaryMask& gt);

// Mean over classes of PixelCrossEntropy(SoftmaxPair(pred_c), gt_c). The two
// key sets must be equal and nonempty.
absl::StatusOr<double> SemanticLoss(
    const std::map<std::string, LogitPair>& preds,
    const std::map<std::string, BinaryMask>& gts);

struct InstanceLossResult {
  double loss = 0.0;
  // GT index assigned to each slot, or -1 for an empty padding mask.
  std::vector<int> gt_for_slot;
};

// GT masks are padded with empty masks to `slot_count`, slots are matched to
// them by Hungarian assignment on cost 1 - IOU (slot binarized at p >= 0.5,
// empty against empty counting as IOU 1), and the loss is the mean cross
// entropy of each slot against its assigned mask.
absl::StatusOr<InstanceLossResult> InstanceLoss(
    std::span<const LogitPair> slots, std::span<const BinaryMask> gts,
    int slot_count = kDefaultInstanceSlots);

struct LogitGradient {
  std::vector<double> yes;
  std::vector<double> no;
};

// Gradient of PixelCrossEntropy(SoftmaxPair(pair), gt) with respect to both
// logit maps: (p - g) / pixel_count for yes and its negation for no. Exact
// wherever the clamp is inactive.
absl::StatusOr<LogitGradient> CrossEntropyGradient(const LogitPair& pair,
                                                   const BinaryMask& gt);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_LOSS_H_
