// Copyright 2026 The symq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "symq/flipping.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "brute_force.hpp"
#include "generators.hpp"
#include "symq/error.hpp"

namespace symq {
namespace {

ValueOracle ThreeFeatureOracle() {
  return ValueOracle::FromSynthetic(
      MultilinearGame{3, {{0b001, 1.0}, {0b011, 2.0}}});
}

TEST(RunFlipTest, RemovalCurve) {
  ValueOracle oracle = ThreeFeatureOracle();
  const std::vector<int> order{0, 1, 2};
  const FlipCurve c = RunFlip(oracle, order, FlipTask::kRemoval);
  EXPECT_EQ(c.values, (std::vector<double>{3, 0, 0, 0}));
  EXPECT_EQ(c.area, 0.75);
}

TEST(RunFlipTest, GenerationMirrorsRemoval) {
  ValueOracle oracle = ValueOracle::FromSynthetic(RandomMultilinearGame(6, 3, 4));
  const std::vector<int> order{3, 0, 5, 1, 4, 2};
  std::vector<int> reversed(order.rbegin(), order.rend());
  const FlipCurve gen = RunFlip(oracle, order, FlipTask::kGeneration);
  const FlipCurve rem = RunFlip(oracle, reversed, FlipTask::kRemoval);
  ASSERT_EQ(gen.values.size(), 7u);
  for (std::size_t j = 0; j <= 6; ++j) {
    EXPECT_EQ(gen.values[j], rem.values[6 - j]);
  }
  EXPECT_EQ(gen.values.front(), 0.0);
  EXPECT_EQ(rem.values.back(), 0.0);
  EXPECT_DOUBLE_EQ(gen.area, rem.area);
}

TEST(RunFlipTest, AdditiveRemoval) {
  ValueOracle oracle = ValueOracle::FromSynthetic(AdditiveGame{{3, 1, 2}});
  const std::vector<int> order{2, 0, 1};
  EXPECT_EQ(RunFlip(oracle, order, FlipTask::kRemoval).values,
            (std::vector<double>{6, 4, 1, 0}));
}

TEST(RunFlipTest, NotAPermutation) {
  ValueOracle oracle = ThreeFeatureOracle();
  for (const std::vector<int>& bad :
       {std::vector<int>{0, 1}, std::vector<int>{0, 1, 1},
        std::vector<int>{0, 1, 3}, std::vector<int>{-1, 0, 1}}) {
    try {
      RunFlip(oracle, bad, FlipTask::kRemoval);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotAPermutation);
    }
  }
}

TEST(SymbXaiOrderTest, FirstRemovalPick) {
  ValueOracle oracle = ThreeFeatureOracle();
  const MultiOrderDecomposition d =
      DecomposePerturbation(oracle, LatticeSupport::Full(3));
  const GreedyOrder g =
      SymbXaiOrder(d, FlipTask::kRemoval, FlipObjective::kMinimize);
  EXPECT_EQ(g.order.front(), 0);
  EXPECT_EQ(g.predicted.front(), 0.0);
}

TEST(SymbXaiOrderTest, AdditiveGeneration) {
  ValueOracle oracle = ValueOracle::FromSynthetic(AdditiveGame{{3, 1, 2}});
  const MultiOrderDecomposition d =
      DecomposePerturbation(oracle, LatticeSupport::Full(3));
  EXPECT_EQ(SymbXaiOrder(d, FlipTask::kGeneration, FlipObjective::kMaximize)
                .order,
            (std::vector<int>{0, 2, 1}));
}

TEST(SymbXaiOrderTest, TiesGoToSmallestIndex) {
  ValueOracle oracle = ValueOracle::FromSynthetic(AdditiveGame{{1, 1, 1, 1}});
  const MultiOrderDecomposition d =
      DecomposePerturbation(oracle, LatticeSupport::Full(4));
  for (FlipTask task : {FlipTask::kRemoval, FlipTask::kGeneration}) {
    for (FlipObjective obj :
         {FlipObjective::kMinimize, FlipObjective::kMaximize}) {
      EXPECT_EQ(SymbXaiOrder(d, task, obj).order,
                (std::vector<int>{0, 1, 2, 3}));
    }
  }
}

// Greedy on the true masked values, written without the query machinery.
std::vector<int> GreedyOnValues(ValueOracle& oracle, FlipTask task,
                                FlipObjective objective) {
  const int n = oracle.n();
  const std::uint64_t all = testing::AllOf(n);
  std::uint64_t flipped = 0;
  std::vector<int> order;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_value = 0;
    for (int f = 0; f < n; ++f) {
      if ((flipped >> f) & 1U) continue;
      const std::uint64_t next = flipped | (std::uint64_t{1} << f);
      const double v = oracle.value(task == FlipTask::kRemoval ? all & ~next
                                                               : next);
      if (best < 0 || (objective == FlipObjective::kMinimize ? v < best_value
                                                             : v > best_value)) {
        best = f;
        best_value = v;
      }
    }
    order.push_back(best);
    flipped |= std::uint64_t{1} << best;
  }
  return order;
}

TEST(SymbXaiOrderTest, GreedyExactness) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // Integer coefficients keep the predictor sums exact, so the argmin
    // comparison with the value-based greedy cannot flip on rounding.
    MultilinearGame g = RandomMultilinearGame(7, 3, seed);
    for (auto& [t, c] : g.coefficients) c = std::round(c * 8.0);
    ValueOracle oracle = ValueOracle::FromSynthetic(g);
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(7));
    for (FlipTask task : {FlipTask::kRemoval, FlipTask::kGeneration}) {
      for (FlipObjective obj :
           {FlipObjective::kMinimize, FlipObjective::kMaximize}) {
        const GreedyOrder greedy = SymbXaiOrder(d, task, obj);
        const FlipCurve curve = RunFlip(oracle, greedy.order, task);
        for (std::size_t j = 0; j < greedy.predicted.size(); ++j) {
          ASSERT_NEAR(greedy.predicted[j], curve.values[j + 1], 1e-9);
        }
        EXPECT_EQ(greedy.order, GreedyOnValues(oracle, task, obj));
      }
    }
  }
}

TEST(FirstOrderOrderTest, Sorting) {
  const std::vector<double> scores{3, 1, 2};
  EXPECT_EQ(FirstOrderOrder(scores, FlipObjective::kMaximize, 3),
            (std::vector<int>{0, 2, 1}));
  EXPECT_EQ(FirstOrderOrder(scores, FlipObjective::kMinimize, 3),
            (std::vector<int>{1, 2, 0}));
  const std::vector<double> equal(4, 0.5);
  EXPECT_EQ(FirstOrderOrder(equal, FlipObjective::kMaximize, 4),
            (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(FirstOrderOrder(equal, FlipObjective::kMinimize, 4),
            (std::vector<int>{0, 1, 2, 3}));
  try {
    FirstOrderOrder(scores, FlipObjective::kMaximize, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(FirstOrderOrderTest, ReversalOnDistinctScores) {
  Rng rng(61);
  std::vector<double> scores(9);
  for (double& s : scores) s = rng.normal();
  std::vector<int> max = FirstOrderOrder(scores, FlipObjective::kMaximize, 9);
  const std::vector<int> min =
      FirstOrderOrder(scores, FlipObjective::kMinimize, 9);
  std::reverse(max.begin(), max.end());
  EXPECT_EQ(max, min);
}

TEST(OcclusionScoresTest, Definition) {
  ValueOracle oracle = ThreeFeatureOracle();
  EXPECT_EQ(OcclusionScores(oracle), (std::vector<double>{3, 2, 0}));
}

TEST(CompareMethodsTest, RandomBaselineApproachesPermutationAverage) {
  const int n = 5;
  ValueOracle oracle = ValueOracle::FromSynthetic(RandomMultilinearGame(n, 3, 8));
  const auto v = [&](std::uint64_t s) { return oracle.value(s); };
  const double removal = testing::AllPermutationArea(v, n, true);
  const double generation = testing::AllPermutationArea(v, n, false);
  const std::vector<FlipMethod> methods{RandomMethod(3, 4000)};
  const std::vector<FlipTask> tasks{FlipTask::kRemoval, FlipTask::kGeneration};
  const std::vector<MethodAreas> rows = CompareMethods(oracle, methods, tasks);
  ASSERT_EQ(rows.size(), 1u);
  // Standard error of a 4000-sample mean of areas is well below 0.05 here.
  double spread = 0.0;
  for (std::uint64_t s = 0; s < 32; ++s) spread = std::max(spread, std::abs(v(s)));
  const double tolerance = 0.05 * std::max(1.0, spread);
  EXPECT_NEAR(*rows[0].min_aurc, removal, tolerance);
  EXPECT_NEAR(*rows[0].max_aurc, removal, tolerance);
  EXPECT_NEAR(*rows[0].min_augc, generation, tolerance);
  EXPECT_NEAR(*rows[0].max_augc, generation, tolerance);
  EXPECT_EQ(rows[0].curves.size(), 4u * 4000u);
}

TEST(CompareMethodsTest, FirstOrderRemovalAndGenerationAreMirrors) {
  ValueOracle oracle = ValueOracle::FromSynthetic(RandomMultilinearGame(8, 3, 9));
  const std::vector<FlipMethod> methods{
      FirstOrderMethod("occlusion", OcclusionScores(oracle))};
  const std::vector<FlipTask> tasks{FlipTask::kRemoval, FlipTask::kGeneration};
  const MethodAreas row = CompareMethods(oracle, methods, tasks)[0];
  EXPECT_DOUBLE_EQ(*row.min_aurc, *row.min_augc);
  EXPECT_DOUBLE_EQ(*row.max_aurc, *row.max_augc);
}

TEST(CompareMethodsTest, OnlyRequestedTasksAndDeterminism) {
  ValueOracle oracle = ValueOracle::FromSynthetic(RandomMultilinearGame(6, 2, 10));
  const MultiOrderDecomposition d =
      DecomposePerturbation(oracle, LatticeSupport::Full(6));
  const std::vector<FlipMethod> methods{SymbXaiMethod(d), RandomMethod(7)};
  const std::vector<FlipTask> tasks{FlipTask::kRemoval};
  const std::vector<MethodAreas> a = CompareMethods(oracle, methods, tasks);
  const std::vector<MethodAreas> b = CompareMethods(oracle, methods, tasks);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].method, "symbxai");
  EXPECT_EQ(a[1].method, "random");
  EXPECT_FALSE(a[0].min_augc.has_value());
  EXPECT_TRUE(a[0].min_aurc.has_value());
  EXPECT_EQ(*a[1].min_aurc, *b[1].min_aurc);
  EXPECT_LE(*a[0].min_aurc, *a[1].min_aurc);
  EXPECT_GE(*a[0].max_aurc, *a[1].max_aurc);
  EXPECT_EQ(a[0].curves[0].objective, FlipObjective::kMinimize);
  EXPECT_EQ(a[0].curves[1].objective, FlipObjective::kMaximize);
  EXPECT_THROW(RandomMethod(1, 0), Error);
}

TEST(CompareMethodsTest, SymbXaiBeatsRandomOnMinAurc) {
  int wins = 0;
  const std::vector<FlipTask> removal{FlipTask::kRemoval};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ValueOracle oracle =
        ValueOracle::FromSynthetic(RandomMultilinearGame(10, 3, 5000 + seed));
    const std::vector<FlipMethod> methods{
        SymbXaiMethod(DecomposePerturbation(oracle, LatticeSupport::Full(10))),
        RandomMethod(seed)};
    const std::vector<MethodAreas> rows =
        CompareMethods(oracle, methods, removal);
    if (*rows[0].min_aurc <= *rows[1].min_aurc) ++wins;
  }
  EXPECT_GE(wins, 95);
}

}  // namespace
}  // namespace symq
