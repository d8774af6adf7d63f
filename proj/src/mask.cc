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

#include "vessel_eval/mask.h"

#include <algorithm>
#include <limits>
#include <utility>

#include "str_cat.h"

namespace vessel_eval {
namespace {

constexpr int64_t kMaxPixels = int64_t{1} << 62;

absl::Status CheckDimensions(int64_t width, int64_t height) {
  if (width <= 0 || height <= 0) {
    return absl::InvalidArgumentError(
        StrCat("mask dimensions must be positive, got ", width, "x", height));
  }
  if (width > kMaxPixels / height) {
    return absl::InvalidArgumentError(
        StrCat("mask dimensions overflow: ", width, "x", height));
  }
  return absl::OkStatus();
}

absl::Status CheckSameDimensions(const BinaryMask& a, const BinaryMask& b) {
  if (!a.SameDimensions(b)) {
    return absl::InvalidArgumentError(
        StrCat("mask dimension mismatch: ", a.width(), "x", a.height(), " vs ",
               b.width(), "x", b.height()));
  }
  return absl::OkStatus();
}

// Appends runs while keeping the zero-first canonical form.
class RunWriter {
 public:
  void Append(bool value, uint64_t length) {
    if (length == 0) return;
    if (runs_.empty()) {
      if (value) runs_.push_back(0);
      runs_.push_back(length);
      last_ = value;
      return;
    }
    if (value == last_) {
      runs_.back() += length;
    } else {
      runs_.push_back(length);
      last_ = value;
    }
  }

  std::vector<uint64_t> Finish() && {
    if (runs_.empty()) runs_.push_back(0);
    return std::move(runs_);
  }

 private:
  std::vector<uint64_t> runs_;
  bool last_ = false;
};

// Walks a run sequence one constant-valued segment at a time.
class RunCursor {
 public:
  explicit RunCursor(const std::vector<uint64_t>& runs) : runs_(runs) {
    remaining_ = runs_.empty() ? 0 : runs_[0];
    Skip();
  }

  bool value() const { return (index_ & 1) != 0; }
  uint64_t remaining() const { return remaining_; }

  void Advance(uint64_t n) {
    remaining_ -= n;
    Skip();
  }

 private:
  void Skip() {
    while (remaining_ == 0 && index_ + 1 < runs_.size()) {
      ++index_;
      remaining_ = runs_[index_];
    }
    if (remaining_ == 0) remaining_ = std::numeric_limits<uint64_t>::max();
  }

  const std::vector<uint64_t>& runs_;
  size_t index_ = 0;
  uint64_t remaining_ = 0;
};

template <typename Op>
std::vector<uint64_t> CombineRuns(const BinaryMask& a, const BinaryMask& b,
                                  Op op) {
  RunCursor ca(a.runs());
  RunCursor cb(b.runs());
  RunWriter writer;
  uint64_t pos = 0;
  const uint64_t total = static_cast<uint64_t>(a.pixel_count());
  while (pos < total) {
    const uint64_t step =
        std::min({ca.remaining(), cb.remaining(), total - pos});
    writer.Append(op(ca.value(), cb.value()), step);
    ca.Advance(step);
    cb.Advance(step);
    pos += step;
  }
  return std::move(writer).Finish();
}

}  // namespace

BinaryMask::BinaryMask() : BinaryMask(1, 1, {1}) {}

BinaryMask::BinaryMask(int64_t width, int64_t height,
                       std::vector<uint64_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
  uint64_t pos = 0;
  bool seen = false;
  for (size_t i = 0; i < runs_.size(); ++i) {
    if (i % 2 == 1 && runs_[i] > 0) {
      area_ += static_cast<int64_t>(runs_[i]);
      if (!seen) {
        first_set_ = static_cast<int64_t>(pos);
        seen = true;
      }
      end_set_ = static_cast<int64_t>(pos + runs_[i]);
    }
    pos += runs_[i];
  }
}

absl::StatusOr<BinaryMask> BinaryMask::FromRuns(int64_t width, int64_t height,
                                                std::vector<uint64_t> runs) {
  if (absl::Status s = CheckDimensions(width, height); !s.ok()) return s;
  if (runs.empty()) {
    return absl::InvalidArgumentError("run list is empty");
  }
  uint64_t sum = 0;
  for (size_t i = 0; i < runs.size(); ++i) {
    if (i > 0 && runs[i] == 0) {
      return absl::InvalidArgumentError(StrCat(
          "run ", i, " has length 0; only the leading zero-run may be empty"));
    }
    if (runs[i] > static_cast<uint64_t>(kMaxPixels) - sum) {
      return absl::InvalidArgumentError("run lengths overflow");
    }
    sum += runs[i];
  }
  if (runs.size() == 1 && runs[0] == 0) {
    return absl::InvalidArgumentError("run list encodes no pixels");
  }
  const uint64_t expected = static_cast<uint64_t>(width * height);
  if (sum != expected) {
    return absl::InvalidArgumentError(
        StrCat("runs sum to ", sum, " but mask has ", expected, " pixels"));
  }
  return BinaryMask(width, height, std::move(runs));
}

absl::StatusOr<BinaryMask> BinaryMask::Encode(std::span<const uint8_t> pixels,
                                              int64_t width, int64_t height) {
  if (absl::Status s = CheckDimensions(width, height); !s.ok()) return s;
  if (static_cast<int64_t>(pixels.size()) != width * height) {
    return absl::InvalidArgumentError(StrCat(
        "pixel count ", pixels.size(), " does not match ", width, "x", height));
  }
  RunWriter writer;
  size_t i = 0;
  while (i < pixels.size()) {
    const bool value = pixels[i] != 0;
    size_t j = i + 1;
    while (j < pixels.size() && (pixels[j] != 0) == value) ++j;
    writer.Append(value, j - i);
    i = j;
  }
  return BinaryMask(width, height, std::move(writer).Finish());
}

absl::StatusOr<BinaryMask> BinaryMask::FromRowSpans(
    int64_t width, int64_t height, std::span<const RowSpan> spans) {
  if (absl::Status s = CheckDimensions(width, height); !s.ok()) return s;
  RunWriter writer;
  int64_t pos = 0;
  for (const RowSpan& span : spans) {
    if (span.row < 0 || span.row >= height) continue;
    const int64_t begin = std::clamp<int64_t>(span.begin, 0, width);
    const int64_t end = std::clamp<int64_t>(span.end, 0, width);
    if (end <= begin) continue;
    const int64_t start = span.row * width + begin;
    if (start < pos) {
      return absl::InvalidArgumentError(
          StrCat("row spans overlap or are unsorted at row ", span.row));
    }
    writer.Append(false, static_cast<uint64_t>(start - pos));
    writer.Append(true, static_cast<uint64_t>(end - begin));
    pos = span.row * width + end;
  }
  writer.Append(false, static_cast<uint64_t>(width * height - pos));
  return BinaryMask(width, height, std::move(writer).Finish());
}

BinaryMask BinaryMask::Empty(int64_t width, int64_t height) {
  return BinaryMask(width, height, {static_cast<uint64_t>(width * height)});
}

BinaryMask BinaryMask::Full(int64_t width, int64_t height) {
  return BinaryMask(width, height, {0, static_cast<uint64_t>(width * height)});
}

std::vector<uint8_t> BinaryMask::Decode() const {
  std::vector<uint8_t> pixels;
  pixels.reserve(static_cast<size_t>(pixel_count()));
  for (size_t i = 0; i < runs_.size(); ++i) {
    pixels.insert(pixels.end(), runs_[i], static_cast<uint8_t>(i % 2));
  }
  return pixels;
}

int64_t IntersectionAreaUnchecked(const BinaryMask& a, const BinaryMask& b) {
  const int64_t lo = std::max(a.first_set(), b.first_set());
  const int64_t hi = std::min(a.end_set(), b.end_set());
  if (lo >= hi) return 0;
  RunCursor ca(a.runs());
  RunCursor cb(b.runs());
  uint64_t pos = 0;
  const uint64_t stop = static_cast<uint64_t>(hi);
  int64_t area = 0;
  while (pos < stop) {
    const uint64_t step =
        std::min({ca.remaining(), cb.remaining(), stop - pos});
    if (ca.value() && cb.value()) area += static_cast<int64_t>(step);
    ca.Advance(step);
    cb.Advance(step);
    pos += step;
  }
  return area;
}

absl::StatusOr<int64_t> IntersectionArea(const BinaryMask& a,
                                         const BinaryMask& b) {
  if (absl::Status s = CheckSameDimensions(a, b); !s.ok()) return s;
  return IntersectionAreaUnchecked(a, b);
}

absl::StatusOr<int64_t> UnionArea(const BinaryMask& a, const BinaryMask& b) {
  if (absl::Status s = CheckSameDimensions(a, b); !s.ok()) return s;
  return a.Area() + b.Area() - IntersectionAreaUnchecked(a, b);
}

absl::StatusOr<Ratio> Iou(const BinaryMask& a, const BinaryMask& b) {
  if (absl::Status s = CheckSameDimensions(a, b); !s.ok()) return s;
  const int64_t inter = IntersectionAreaUnchecked(a, b);
  const int64_t uni = a.Area() + b.Area() - inter;
  if (uni == 0) return Ratio();
  return Ratio(static_cast<double>(inter) / static_cast<double>(uni));
}

absl::StatusOr<double> OverlapFraction(const BinaryMask& inner,
                                       const BinaryMask& outer) {
  if (absl::Status s = CheckSameDimensions(inner, outer); !s.ok()) return s;
  if (inner.IsEmpty()) {
    return absl::InvalidArgumentError(
        "overlap fraction of an empty inner mask is degenerate");
  }
  return static_cast<double>(IntersectionAreaUnchecked(inner, outer)) /
         static_cast<double>(inner.Area());
}

absl::StatusOr<BinaryMask> MaskUnion(const BinaryMask& a, const BinaryMask& b) {
  if (absl::Status s = CheckSameDimensions(a, b); !s.ok()) return s;
  return BinaryMask::FromRuns(
      a.width(), a.height(),
      CombineRuns(a, b, [](bool x, bool y) { return x || y; }));
}

absl::StatusOr<BinaryMask> MaskIntersection(const BinaryMask& a,
                                            const BinaryMask& b) {
  if (absl::Status s = CheckSameDimensions(a, b); !s.ok()) return s;
  return BinaryMask::FromRuns(
      a.width(), a.height(),
      CombineRuns(a, b, [](bool x, bool y) { return x && y; }));
}

}  // namespace vessel_eval
