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

#include "vessel_eval/hungarian.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "str_cat.h"

namespace vessel_eval {
namespace {

// Optimal cost and one optimal assignment of a square matrix.
double SolveMinCost(const DenseMatrix& a, std::vector<int>* column_for_row) {
  const int n = a.rows();
  column_for_row->assign(n, -1);
  if (n == 0) return 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> row_of(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = row_of[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) (*column_for_row)[row_of[j] - 1] = j - 1;
  double total = 0.0;
  for (int r = 0; r < n; ++r) total += a(r, (*column_for_row)[r]);
  return total;
}

DenseMatrix SubMatrix(const DenseMatrix& a, int first_row,
                      const std::vector<int>& columns) {
  const int n = static_cast<int>(columns.size());
  DenseMatrix sub(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) sub(r, c) = a(first_row + r, columns[c]);
  }
  return sub;
}

}  // namespace

absl::StatusOr<Assignment> HungarianAssign(const DenseMatrix& cost) {
  if (cost.rows() != cost.cols()) {
    return absl::InvalidArgumentError(
        StrCat("assignment needs a square matrix, got ", cost.rows(), "x",
               cost.cols()));
  }
  for (double value : cost.values()) {
    if (!std::isfinite(value) || value < 0.0) {
      return absl::InvalidArgumentError(StrCat(
          "assignment costs must be finite and non-negative, got ", value));
    }
  }
  const int n = cost.rows();
  std::vector<int> scratch;
  const double optimum = SolveMinCost(cost, &scratch);
  const double tolerance = 1e-9 * std::max(1.0, std::abs(optimum));

  Assignment result;
  result.column_for_row.reserve(n);
  std::vector<int> free_columns(n);
  for (int c = 0; c < n; ++c) free_columns[c] = c;
  double fixed_cost = 0.0;
  for (int r = 0; r < n; ++r) {
    bool placed = false;
    for (size_t k = 0; k < free_columns.size(); ++k) {
      std::vector<int> rest = free_columns;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      const double rest_cost =
          SolveMinCost(SubMatrix(cost, r + 1, rest), &scratch);
      if (fixed_cost + cost(r, free_columns[k]) + rest_cost <=
          optimum + tolerance) {
        fixed_cost += cost(r, free_columns[k]);
        result.column_for_row.push_back(free_columns[k]);
        free_columns = std::move(rest);
        placed = true;
        break;
      }
    }
    if (!placed) {
      return absl::InternalError("assignment tie-break lost optimality");
    }
  }
  for (int r = 0; r < n; ++r) {
    result.total_cost += cost(r, result.column_for_row[r]);
  }
  return result;
}

}  // namespace vessel_eval
