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

// Input flipping: removal and generation curves for a feature ordering, the
// areas under them, and the orderings that compete on them.
//
// For an ordering (I_1, ..., I_n):
//   removal    values_j = v(N \ {I_1..I_j}),  j = 0..n
//   generation values_j = v({I_1..I_j}),      j = 0..n
//   area       = mean of the n+1 values

#ifndef SYMQ_FLIPPING_HPP_
#define SYMQ_FLIPPING_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symq/decomposition.hpp"
#include "symq/oracle.hpp"

namespace symq {

enum class FlipTask { kRemoval, kGeneration };
enum class FlipObjective { kMinimize, kMaximize };

std::string_view FlipTaskName(FlipTask task);
std::string_view FlipObjectiveName(FlipObjective objective);

struct FlipCurve {
  FlipTask task = FlipTask::kRemoval;
  std::optional<FlipObjective> objective;
  std::vector<int> order;
  std::vector<double> values;  // n + 1 entries
  double area = 0.0;
};

// Mean of the curve values.
double CurveArea(std::span<const double> values);

// Throws NotAPermutation unless `order` is a permutation of [0, n).
FlipCurve RunFlip(ValueOracle& oracle, std::span<const int> order,
                  FlipTask task);

struct GreedyOrder {
  std::vector<int> order;
  // predicted[j] is the predictor value of the pick I_{j+1}, i.e. the
  // anticipated curve value after j+1 flips.
  std::vector<double> predicted;
};

// Local-best-guess ordering with occlusion weights. Removal extends the
// removed set R by the feature minimizing (maximizing) A(!(R + I')),
// generation extends the kept set S by the feature optimizing
// A((S + I') & !complement). Ties go to the smallest feature index.
GreedyOrder SymbXaiOrder(const MultiOrderDecomposition& d, FlipTask task,
                         FlipObjective objective);

// Features sorted by score, descending for kMaximize and ascending for
// kMinimize; ties by index. Throws ShapeMismatch if scores.size() != n.
std::vector<int> FirstOrderOrder(std::span<const double> scores,
                                 FlipObjective objective, int n);

// Occlusion relevance of single features: v(N) - v(N \ {i}).
std::vector<double> OcclusionScores(ValueOracle& oracle);

// Produces one or more orderings of n features for a task/objective pair; a
// method's area is the mean area over its orderings.
using OrderProducer = std::function<std::vector<std::vector<int>>(
    FlipTask, FlipObjective, int n)>;

struct FlipMethod {
  std::string name;
  OrderProducer produce;
};

FlipMethod SymbXaiMethod(MultiOrderDecomposition d);
// First-order ordering from per-feature relevance scores. Generation adds
// the most relevant features first when maximizing; removal deletes them
// first when minimizing.
FlipMethod FirstOrderMethod(std::string name, std::vector<double> scores);
// Uniformly random orderings; `samples` per task/objective pair.
FlipMethod RandomMethod(std::uint64_t seed, int samples = 1);

struct MethodAreas {
  std::string method;
  std::optional<double> min_aurc;
  std::optional<double> max_aurc;
  std::optional<double> min_augc;
  std::optional<double> max_augc;
  std::vector<FlipCurve> curves;
};

// For each method and each requested task, the min and max objective areas.
std::vector<MethodAreas> CompareMethods(ValueOracle& oracle,
                                        std::span<const FlipMethod> methods,
                                        std::span<const FlipTask> tasks);

}  // namespace symq

#endif  // SYMQ_FLIPPING_HPP_
