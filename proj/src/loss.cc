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

#include <algorithm>
#include <cmath>

#include "str_cat.h"
#include "vessel_eval/hungarian.h"
#include "vessel_eval/matching.h"

namespace vessel_eval {
namespace {

absl::Status CheckSize(int64_t width, int64_t height, const BinaryMask& gt) {
  if (gt.width() != width || gt.height() != height) {
    return absl::InvalidArgumentError(StrCat("prediction is ", width, "x",
                                             height, ", GT mask is ",
                                             gt.width(), "x", gt.height()));
  }
  return absl::OkStatus();
}

double Clamp(double p) {
  return std::clamp(p, kLossEpsilon, 1.0 - kLossEpsilon);
}

// e^a / (e^a + e^b) with the larger exponent factored out.
double StableSoftmax(double a, double b) {
  const double d = a - b;
  if (d >= 0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

}  // namespace

absl::Status ValidateLogitPair(const LogitPair& pair) {
  if (pair.width <= 0 || pair.height <= 0) {
    return absl::InvalidArgumentError("logit maps need positive dimensions");
  }
  const auto n = static_cast<size_t>(pair.width * pair.height);
  if (pair.yes.size() != n || pair.no.size() != n) {
    return absl::InvalidArgumentError(
        StrCat("logit maps hold ", pair.yes.size(), " and ", pair.no.size(),
               " values, expected ", n));
  }
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(pair.yes[i]) || !std::isfinite(pair.no[i])) {
      return absl::InvalidArgumentError(
          StrCat("non-finite logit at pixel ", i));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ProbabilityMap> SoftmaxPair(const LogitPair& pair) {
  if (absl::Status s = ValidateLogitPair(pair); !s.ok()) return s;
  ProbabilityMap p{pair.width, pair.height, {}};
  p.values.resize(pair.yes.size());
  for (size_t i = 0; i < p.values.size(); ++i) {
    p.values[i] = StableSoftmax(pair.yes[i], pair.no[i]);
  }
  return p;
}

absl::StatusOr<double> PixelCrossEntropy(const ProbabilityMap& p,
                                         const BinaryMask& gt) {
  if (absl::Status s = CheckSize(p.width, p.height, gt); !s.ok()) return s;
  if (p.values.size() != static_cast<size_t>(p.width * p.height)) {
    return absl::InvalidArgumentError("probability map size mismatch");
  }
  const std::vector<uint8_t> g = gt.Decode();
  double sum = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    const double q = Clamp(p.values[i]);
    sum -= g[i] ? std::log(q) : std::log(1.0 - q);
  }
  return sum / static_cast<double>(g.size());
}

absl::StatusOr<double> SemanticLoss(
    const std::map<std::string, LogitPair>& preds,
    const std::map<std::string, BinaryMask>& gts) {
  if (preds.empty()) return absl::InvalidArgumentError("no classes given");
  for (const auto& [label, unused] : gts) {
    if (!preds.contains(label)) {
      return absl::NotFoundError(
          StrCat("no prediction for class '", label, "'"));
    }
  }
  double sum = 0.0;
  for (const auto& [label, pair] : preds) {
    auto gt = gts.find(label);
    if (gt == gts.end()) {
      return absl::NotFoundError(StrCat("no GT map for class '", label, "'"));
    }
    absl::StatusOr<ProbabilityMap> p = SoftmaxPair(pair);
    if (!p.ok()) return p.status();
    absl::StatusOr<double> ce = PixelCrossEntropy(*p, gt->second);
    if (!ce.ok()) return ce.status();
    sum += *ce;
  }
  return sum / static_cast<double>(preds.size());
}

absl::StatusOr<InstanceLossResult> InstanceLoss(
    std::span<const LogitPair> slots, std::span<const BinaryMask> gts,
    int slot_count) {
  if (slot_count <= 0 || static_cast<int>(slots.size()) != slot_count) {
    return absl::InvalidArgumentError(StrCat(
        "expected ", slot_count, " prediction slots, got ", slots.size()));
  }
  const int64_t width = slots.front().width;
  const int64_t height = slots.front().height;
  absl::StatusOr<std::vector<BinaryMask>> padded =
      PadInstances(gts, slot_count, width, height);
  if (!padded.ok()) return padded.status();

  std::vector<ProbabilityMap> probs;
  std::vector<BinaryMask> binary;
  for (const LogitPair& slot : slots) {
    if (slot.width != width || slot.height != height) {
      return absl::InvalidArgumentError("slots differ in dimensions");
    }
    absl::StatusOr<ProbabilityMap> p = SoftmaxPair(slot);
    if (!p.ok()) return p.status();
    std::vector<uint8_t> bits(p->values.size());
    for (size_t i = 0; i < bits.size(); ++i) bits[i] = p->values[i] >= 0.5;
    absl::StatusOr<BinaryMask> mask = BinaryMask::Encode(bits, width, height);
    if (!mask.ok()) return mask.status();
    binary.push_back(*std::move(mask));
    probs.push_back(*std::move(p));
  }

  DenseMatrix cost(slot_count, slot_count);
  for (int s = 0; s < slot_count; ++s) {
    for (int g = 0; g < slot_count; ++g) {
      absl::StatusOr<Ratio> iou = Iou(binary[s], (*padded)[g]);
      if (!iou.ok()) return iou.status();
      cost(s, g) = 1.0 - iou->value_or(1.0);
    }
  }
  absl::StatusOr<Assignment> assignment = HungarianAssign(cost);
  if (!assignment.ok()) return assignment.status();

  InstanceLossResult result;
  const int real = static_cast<int>(gts.size());
  double sum = 0.0;
  for (int s = 0; s < slot_count; ++s) {
    const int g = assignment->column_for_row[s];
    absl::StatusOr<double> ce = PixelCrossEntropy(probs[s], (*padded)[g]);
    if (!ce.ok()) return ce.status();
    sum += *ce;
    result.gt_for_slot.push_back(g < real ? g : -1);
  }
  result.loss = sum / static_cast<double>(slot_count);
  return result;
}

absl::StatusOr<LogitGradient> CrossEntropyGradient(const LogitPair& pair,
                                                   const BinaryMask& gt) {
  if (absl::Status s = CheckSize(pair.width, pair.height, gt); !s.ok()) {
    return s;
  }
  absl::StatusOr<ProbabilityMap> p = SoftmaxPair(pair);
  if (!p.ok()) return p.status();
  const std::vector<uint8_t> g = gt.Decode();
  const auto n = static_cast<double>(g.size());
  LogitGradient grad;
  grad.yes.resize(g.size());
  grad.no.resize(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    grad.yes[i] = (p->values[i] - g[i]) / n;
    grad.no[i] = -grad.yes[i];
  }
  return grad;
}

}  // namespace vessel_eval
