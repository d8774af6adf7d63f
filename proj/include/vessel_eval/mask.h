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

#ifndef VESSEL_EVAL_MASK_H_
#define VESSEL_EVAL_MASK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace vessel_eval {

// A ratio whose denominator may be zero. std::nullopt is the undefined
// (ABSENT) value; it is never silently replaced by 0 or 1.
using Ratio = std::optional<double>;

// Half-open pixel interval [begin, end) on one image row.
struct RowSpan {
  int64_t row = 0;
  int64_t begin = 0;
  int64_t end = 0;
};

// Binary pixel region of fixed dimensions, stored as row-major run lengths.
//
// Runs alternate zero-run, one-run, zero-run, ... starting with a zero-run
// that may have length 0. Every other run is strictly positive, so the
// encoding of a given pixel set is unique. The runs always sum to
// width * height.
//
// Masks are immutable after construction and safe to share across threads.
class BinaryMask {
 public:
  // 1x1 empty mask. Exists so masks can live in default-constructed
  // containers; real masks come from the factories below.
  BinaryMask();

  // Validates dimensions and canonical form of `runs`.
  static absl::StatusOr<BinaryMask> FromRuns(int64_t width, int64_t height,
                                             std::vector<uint64_t> runs);

  // Row-major bits, one byte per pixel (nonzero = set).
  static absl::StatusOr<BinaryMask> Encode(std::span<const uint8_t> pixels,
                                           int64_t width, int64_t height);

  // Builds a mask from row spans. Spans must be sorted by (row, begin) and
  // must not overlap; spans are clipped to the image.
  static absl::StatusOr<BinaryMask> FromRowSpans(
      int64_t width, int64_t height, std::span<const RowSpan> spans);

  static BinaryMask Empty(int64_t width, int64_t height);
  static BinaryMask Full(int64_t width, int64_t height);

  std::vector<uint8_t> Decode() const;

  int64_t width() const { return width_; }
  int64_t height() const { return height_; }
  int64_t pixel_count() const { return width_ * height_; }
  const std::vector<uint64_t>& runs() const { return runs_; }

  int64_t Area() const { return area_; }
  bool IsEmpty() const { return area_ == 0; }
  bool SameDimensions(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  // Offset of the first set pixel and one past the last set pixel. Both are
  // 0 for an empty mask.
  int64_t first_set() const { return first_set_; }
  int64_t end_set() const { return end_set_; }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.runs_ == b.runs_;
  }

 private:
  BinaryMask(int64_t width, int64_t height, std::vector<uint64_t> runs);

  int64_t width_ = 1;
  int64_t height_ = 1;
  std::vector<uint64_t> runs_;
  int64_t area_ = 0;
  int64_t first_set_ = 0;
  int64_t end_set_ = 0;
};

absl::StatusOr<int64_t> IntersectionArea(const BinaryMask& a,
                                         const BinaryMask& b);
absl::StatusOr<int64_t> UnionArea(const BinaryMask& a, const BinaryMask& b);

// |a ∩ b| / |a ∪ b|, undefined when both masks are empty.
absl::StatusOr<Ratio> Iou(const BinaryMask& a, const BinaryMask& b);

// |inner ∩ outer| / |inner|. `inner` must be nonempty.
absl::StatusOr<double> OverlapFraction(const BinaryMask& inner,
                                       const BinaryMask& outer);

absl::StatusOr<BinaryMask> MaskUnion(const BinaryMask& a, const BinaryMask& b);
absl::StatusOr<BinaryMask> MaskIntersection(const BinaryMask& a,
                                            const BinaryMask& b);

// Unchecked kernel; callers guarantee equal dimensions.
int64_t IntersectionAreaUnchecked(const BinaryMask& a, const BinaryMask& b);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_MASK_H_
