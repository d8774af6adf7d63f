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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "test_util.h"

namespace vessel_eval {
namespace {

using ::vessel_eval::testing::BruteForceMinCost;
using ::vessel_eval::testing::Unwrap;

DenseMatrix FromRows(const std::vector<std::vector<double>>& rows) {
  DenseMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
  }
  return m;
}

// Lexicographically smallest optimal permutation, by enumeration.
std::vector<int> BruteForceLexMin(const DenseMatrix& cost) {
  const double best = BruteForceMinCost(cost);
  std::vector<int> perm(static_cast<size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    double total = 0.0;
    for (int r = 0; r < cost.rows(); ++r) total += cost(r, perm[r]);
    if (total == best) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {};
}

TEST(HungarianTest, IdentityLikeCost) {
  DenseMatrix cost(4, 4, 1.0);
  for (int i = 0; i < 4; ++i) cost(i, i) = 0.0;
  const Assignment a = Unwrap(HungarianAssign(cost));
  EXPECT_EQ(a.column_for_row, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(HungarianTest, TwoByTwoWorkedExample) {
  const Assignment a =
      Unwrap(HungarianAssign(FromRows({{0.1, 0.9}, {0.2, 0.3}})));
  EXPECT_EQ(a.column_for_row, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(a.total_cost, 0.4);
}

TEST(HungarianTest, RejectsBadInput) {
  EXPECT_FALSE(HungarianAssign(DenseMatrix(2, 3)).ok());
  DenseMatrix negative(2, 2);
  negative(0, 1) = -1.0;
  EXPECT_FALSE(HungarianAssign(negative).ok());
  DenseMatrix nan(2, 2);
  nan(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(HungarianAssign(nan).ok());
  DenseMatrix inf(2, 2);
  inf(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(HungarianAssign(inf).ok());
}

TEST(HungarianTest, EmptyMatrix) {
  const Assignment a = Unwrap(HungarianAssign(DenseMatrix(0, 0)));
  EXPECT_TRUE(a.column_for_row.empty());
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(HungarianTest, MatchesBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(rng);
    DenseMatrix cost(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) cost(r, c) = value(rng);
    }
    const Assignment a = Unwrap(HungarianAssign(cost));
    ASSERT_EQ(a.total_cost, BruteForceMinCost(cost)) << "trial " << trial;
    EXPECT_EQ(
        std::set<int>(a.column_for_row.begin(), a.column_for_row.end()).size(),
        static_cast<size_t>(n));
  }
}

// Small integer costs make ties common; the tie-break must pick the
// lexicographically smallest optimum.
TEST(HungarianTest, TieBreakIsLexicographic) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_int_distribution<int> value(0, 2);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = size(rng);
    DenseMatrix cost(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) cost(r, c) = value(rng);
    }
    const Assignment a = Unwrap(HungarianAssign(cost));
    ASSERT_EQ(a.column_for_row, BruteForceLexMin(cost)) << "trial " << trial;
  }
}

TEST(HungarianTest, Deterministic) {
  DenseMatrix cost(5, 5, 0.5);
  const Assignment a = Unwrap(HungarianAssign(cost));
  EXPECT_EQ(a.column_for_row, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(Unwrap(HungarianAssign(cost)).column_for_row, a.column_for_row);
}

}  // namespace
}  // namespace vessel_eval
