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

#ifndef VESSEL_EVAL_HUNGARIAN_H_
#define VESSEL_EVAL_HUNGARIAN_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace vessel_eval {

// Row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows),
        cols_(cols),
        values_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) {
    return values_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return values_[static_cast<size_t>(r) * cols_ + c];
  }

  std::span<const double> values() const { return values_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

struct Assignment {
  // column_for_row[r] is the column assigned to row r.
  std::vector<int> column_for_row;
  // Sum of cost(r, column_for_row[r]) accumulated in row order.
  double total_cost = 0.0;
};

// Minimum-cost perfect assignment on a square matrix of finite non-negative
// costs (Kuhn-Munkres with potentials, O(n^3)).
//
// Among optimal assignments the lexicographically smallest column sequence is
// returned. The tie-break re-solves reduced problems row by row, so the whole
// call is O(n^5); intended for the small matrices of slot matching.
absl::StatusOr<Assignment> HungarianAssign(const DenseMatrix& cost);

}  // namespace vessel_eval

#endif  // VESSEL_EVAL_HUNGARIAN_H_
