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

#include <algorithm>
#include <memory>
#include <numeric>

#include "symq/error.hpp"
#include "symq/query.hpp"
#include "symq/random.hpp"
#include "symq/relevance.hpp"

namespace symq {
namespace {

std::uint64_t AllFeatures(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

// Predictor query for the set of features flipped so far.
Query PredictorQuery(FlipTask task, std::uint64_t flipped, int n) {
  if (task == FlipTask::kRemoval) return Query::Not(Query::Atom(flipped));
  const std::uint64_t rest = AllFeatures(n) & ~flipped;
  if (rest == 0) return Query::Atom(flipped);
  return Query::And(Query::Atom(flipped), Query::Not(Query::Atom(rest)));
}

FlipObjective Opposite(FlipObjective objective) {
  return objective == FlipObjective::kMinimize ? FlipObjective::kMaximize
                                               : FlipObjective::kMinimize;
}

}  // namespace

std::string_view FlipTaskName(FlipTask task) {
  return task == FlipTask::kRemoval ? "removal" : "generation";
}

std::string_view FlipObjectiveName(FlipObjective objective) {
  return objective == FlipObjective::kMinimize ? "min" : "max";
}

double CurveArea(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

FlipCurve RunFlip(ValueOracle& oracle, std::span<const int> order,
                  FlipTask task) {
  const int n = oracle.n();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  if (order.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kNotAPermutation,
                "ordering has " + std::to_string(order.size()) +
                    " entries for " + std::to_string(n) + " features");
  }
  for (int f : order) {
    if (f < 0 || f >= n || seen[static_cast<std::size_t>(f)]) {
      throw Error(ErrorCode::kNotAPermutation,
                  "ordering is not a permutation of [0, " +
                      std::to_string(n) + ")");
    }
    seen[static_cast<std::size_t>(f)] = true;
  }

  std::vector<std::uint64_t> subsets;
  subsets.reserve(order.size() + 1);
  std::uint64_t flipped = 0;
  const std::uint64_t all = AllFeatures(n);
  subsets.push_back(task == FlipTask::kRemoval ? all : 0);
  for (int f : order) {
    flipped |= std::uint64_t{1} << f;
    subsets.push_back(task == FlipTask::kRemoval ? all & ~flipped : flipped);
  }

  FlipCurve curve;
  curve.task = task;
  curve.order.assign(order.begin(), order.end());
  curve.values = oracle.batch_values(subsets);
  curve.area = CurveArea(curve.values);
  return curve;
}

GreedyOrder SymbXaiOrder(const MultiOrderDecomposition& d, FlipTask task,
                         FlipObjective objective) {
  const int n = d.support.n();
  const std::vector<double> eta = WeightVector::Occlusion().Resolve(d).eta;
  GreedyOrder out;
  std::uint64_t flipped = 0;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_value = 0.0;
    for (int f = 0; f < n; ++f) {
      const std::uint64_t bit = std::uint64_t{1} << f;
      if ((flipped & bit) != 0) continue;
      const Query q = PredictorQuery(task, flipped | bit, n);
      const double value =
          WeightedFilterSum(d, eta, EvaluateFilter(q, d.support));
      const bool better = objective == FlipObjective::kMinimize
                              ? value < best_value
                              : value > best_value;
      if (best < 0 || better) {
        best = f;
        best_value = value;
      }
    }
    flipped |= std::uint64_t{1} << best;
    out.order.push_back(best);
    out.predicted.push_back(best_value);
  }
  return out;
}

std::vector<int> FirstOrderOrder(std::span<const double> scores,
                                 FlipObjective objective, int n) {
  if (scores.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(n) + " scores, got " +
                    std::to_string(scores.size()));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return objective == FlipObjective::kMaximize ? sa > sb : sa < sb;
  });
  return order;
}

std::vector<double> OcclusionScores(ValueOracle& oracle) {
  const int n = oracle.n();
  const std::uint64_t all = AllFeatures(n);
  std::vector<std::uint64_t> subsets{all};
  for (int i = 0; i < n; ++i) subsets.push_back(all & ~(std::uint64_t{1} << i));
  const std::vector<double> values = oracle.batch_values(subsets);
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = values[0] - values[i + 1];
  }
  return scores;
}

FlipMethod SymbXaiMethod(MultiOrderDecomposition d) {
  auto shared = std::make_shared<const MultiOrderDecomposition>(std::move(d));
  return {"symbxai",
          [shared](FlipTask task, FlipObjective objective, int n) {
            if (n != shared->support.n()) {
              throw Error(ErrorCode::kShapeMismatch,
                          "decomposition and oracle disagree on the feature "
                          "count");
            }
            return std::vector<std::vector<int>>{
                SymbXaiOrder(*shared, task, objective).order};
          }};
}

FlipMethod FirstOrderMethod(std::string name, std::vector<double> scores) {
  return {std::move(name), [scores = std::move(scores)](
                               FlipTask task, FlipObjective objective, int n) {
            const FlipObjective direction =
                task == FlipTask::kGeneration ? objective : Opposite(objective);
            return std::vector<std::vector<int>>{
                FirstOrderOrder(scores, direction, n)};
          }};
}

FlipMethod RandomMethod(std::uint64_t seed, int samples) {
  if (samples < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "random baseline needs at least one sample");
  }
  return {"random", [seed, samples](FlipTask task, FlipObjective objective,
                                    int n) {
            // Independent stream per task/objective pair, so the result for
            // one pair does not depend on which other pairs were requested.
            const std::uint64_t stream =
                static_cast<std::uint64_t>(task == FlipTask::kGeneration) * 2 +
                static_cast<std::uint64_t>(objective ==
                                           FlipObjective::kMaximize);
            Rng rng(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
            std::vector<std::vector<int>> orders;
            for (int s = 0; s < samples; ++s) {
              std::vector<int> order(static_cast<std::size_t>(n));
              std::iota(order.begin(), order.end(), 0);
              rng.shuffle(std::span<int>(order));
              orders.push_back(std::move(order));
            }
            return orders;
          }};
}

std::vector<MethodAreas> CompareMethods(ValueOracle& oracle,
                                        std::span<const FlipMethod> methods,
                                        std::span<const FlipTask> tasks) {
  const int n = oracle.n();
  std::vector<MethodAreas> rows;
  for (const FlipMethod& method : methods) {
    MethodAreas row;
    row.method = method.name;
    for (FlipTask task : tasks) {
      for (FlipObjective objective :
           {FlipObjective::kMinimize, FlipObjective::kMaximize}) {
        const auto orders = method.produce(task, objective, n);
        if (orders.empty()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "method " + method.name + " produced no ordering");
        }
        double total = 0.0;
        for (const auto& order : orders) {
          FlipCurve curve = RunFlip(oracle, order, task);
          curve.objective = objective;
          total += curve.area;
          row.curves.push_back(std::move(curve));
        }
        const double area = total / static_cast<double>(orders.size());
        const bool minimize = objective == FlipObjective::kMinimize;
        if (task == FlipTask::kRemoval) {
          (minimize ? row.min_aurc : row.max_aurc) = area;
        } else {
          (minimize ? row.min_augc : row.max_augc) = area;
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace symq
