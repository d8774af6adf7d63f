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

#include "vessel_eval/matching.h"

#include <algorithm>
#include <tuple>

#include "str_cat.h"

namespace vessel_eval {
namespace {

// Below this many pairs the OpenMP fork costs more than it saves.
constexpr int kParallelPairThreshold = 64;

absl::Status CheckShared(std::span<const BinaryMask* const> preds,
                         std::span<const BinaryMask* const> gts) {
  const BinaryMask* first = nullptr;
  for (auto list : {preds, gts}) {
    for (const BinaryMask* mask : list) {
      if (first == nullptr) {
        first = mask;
      } else if (!first->SameDimensions(*mask)) {
        return absl::InvalidArgumentError(StrCat(
            "mask dimension mismatch: ", first->width(), "x", first->height(),
            " vs ", mask->width(), "x", mask->height()));
      }
    }
  }
  return absl::OkStatus();
}

double IouOrZero(const BinaryMask& a, const BinaryMask& b) {
  const int64_t inter = IntersectionAreaUnchecked(a, b);
  const int64_t uni = a.Area() + b.Area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool Intersects(const LabelSet& a, const LabelSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

}  // namespace

absl::StatusOr<DenseMatrix> ComputeIouMatrixSerial(
    std::span<const BinaryMask* const> preds,
    std::span<const BinaryMask* const> gts) {
  if (absl::Status s = CheckShared(preds, gts); !s.ok()) return s;
  const int rows = static_cast<int>(preds.size());
  const int cols = static_cast<int>(gts.size());
  DenseMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = IouOrZero(*preds[i], *gts[j]);
  }
  return out;
}

absl::StatusOr<DenseMatrix> ComputeIouMatrix(
    std::span<const BinaryMask* const> preds,
    std::span<const BinaryMask* const> gts) {
  if (absl::Status s = CheckShared(preds, gts); !s.ok()) return s;
  const int rows = static_cast<int>(preds.size());
  const int cols = static_cast<int>(gts.size());
  DenseMatrix out(rows, cols);
#pragma omp parallel for schedule(dynamic) if (rows * cols >= \
                                                   kParallelPairThreshold)
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = IouOrZero(*preds[i], *gts[j]);
  }
  return out;
}

absl::StatusOr<MatchResult> PqMatch(std::span<const SegmentView> preds,
                                    std::span<const SegmentView> gts,
                                    MatchMode mode) {
  std::vector<const BinaryMask*> pred_masks, gt_masks;
  pred_masks.reserve(preds.size());
  gt_masks.reserve(gts.size());
  for (const SegmentView& s : preds) pred_masks.push_back(s.mask);
  for (const SegmentView& s : gts) gt_masks.push_back(s.mask);
  absl::StatusOr<DenseMatrix> iou = ComputeIouMatrix(pred_masks, gt_masks);
  if (!iou.ok()) return iou.status();

  struct Candidate {
    double iou;
    int gt;
    int pred;
  };
  std::vector<Candidate> candidates;
  for (int p = 0; p < iou->rows(); ++p) {
    for (int g = 0; g < iou->cols(); ++g) {
      const double value = (*iou)(p, g);
      if (value <= kMatchIouThreshold) continue;
      if (mode == MatchMode::kWithClass &&
          !Intersects(*preds[p].labels, *gts[g].labels)) {
        continue;
      }
      candidates.push_back({value, g, p});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(b.iou, a.gt, a.pred) <
                     std::tie(a.iou, b.gt, b.pred);
            });

  std::vector<bool> pred_used(preds.size(), false), gt_used(gts.size(), false);
  MatchResult result;
  result.mode = mode;
  for (const Candidate& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    result.matches.push_back({c.pred, c.gt, c.iou});
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const Match& a, const Match& b) { return a.gt < b.gt; });
  for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
    if (!gt_used[g]) result.fn_gt.push_back(g);
  }
  for (int p = 0; p < static_cast<int>(preds.size()); ++p) {
    if (!pred_used[p]) result.fp_pred.push_back(p);
  }
  return result;
}

absl::StatusOr<std::vector<BinaryMask>> PadInstances(
    std::span<const BinaryMask> gt_masks, int slot_count, int64_t width,
    int64_t height) {
  if (static_cast<int64_t>(gt_masks.size()) > slot_count) {
    return absl::ResourceExhaustedError(
        StrCat(gt_masks.size(), " GT instances exceed ", slot_count,
               " prediction slots"));
  }
  if (width <= 0 || height <= 0) {
    return absl::InvalidArgumentError("padding needs positive dimensions");
  }
  std::vector<BinaryMask> out;
  out.reserve(slot_count);
  for (const BinaryMask& mask : gt_masks) {
    if (mask.width() != width || mask.height() != height) {
      return absl::InvalidArgumentError(StrCat("GT mask is ", mask.width(), "x",
                                               mask.height(), ", expected ",
                                               width, "x", height));
    }
    out.push_back(mask);
  }
  while (static_cast<int>(out.size()) < slot_count) {
    out.push_back(BinaryMask::Empty(width, height));
  }
  return out;
}

absl::StatusOr<std::vector<LabelSet>> AssignClassesToInstances(
    std::span<const BinaryMask> instance_masks,
    std::span<const SemanticMap> semantic_maps) {
  std::vector<LabelSet> out(instance_masks.size());
  for (size_t i = 0; i < instance_masks.size(); ++i) {
    const BinaryMask& inst = instance_masks[i];
    if (inst.IsEmpty()) {
      return absl::InvalidArgumentError(
          StrCat("instance ", i, " has an empty mask"));
    }
    for (const SemanticMap& map : semantic_maps) {
      absl::StatusOr<int64_t> overlap = IntersectionArea(inst, map.mask);
      if (!overlap.ok()) return overlap.status();
      // overlap / area > 33 / 100, compared exactly in integers.
      if (*overlap * 100 > inst.Area() * 33) out[i].insert(map.label);
    }
  }
  return out;
}

}  // namespace vessel_eval
