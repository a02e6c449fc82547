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

// Query relevance A(eta, mu, q) = sum_L eta_L * mu_L * lambda_L(q).
//
// Weight rules:
//   occlusion        eta_L = 1
//   classic Shapley  eta_L = 1/|L|, eta_{} = 0
//   query-set        eta_L = 1 / (number of queries of the set true on L);
//                    makes the relevances of the set sum to sum_L mu_L
//   custom           user table, 0 where unspecified
//
// On a truncated decomposition the sum runs over the truncated support only.

#ifndef SYMQ_RELEVANCE_HPP_
#define SYMQ_RELEVANCE_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "symq/decomposition.hpp"
#include "symq/query.hpp"

namespace symq {

enum class Strictness {
  // Every subset carrying mu-mass must be covered by some query.
  kStrict,
  // Uncovered subsets get weight 0; their mass is reported.
  kPermissive,
};

struct ResolvedWeights {
  std::vector<double> eta;  // aligned with the decomposition support
  // Sum of mu over subsets no query covers (query-set rule only).
  double uncovered_mass = 0.0;
};

class WeightVector {
 public:
  enum class Rule { kOcclusion, kClassicShapley, kQuerySetShapley, kCustom };

  static WeightVector Occlusion();
  static WeightVector ClassicShapley();
  static WeightVector QuerySetShapley(std::vector<Query> queries,
                                      Strictness strictness =
                                          Strictness::kStrict);
  static WeightVector Custom(std::map<std::uint64_t, double> table);

  Rule rule() const noexcept { return rule_; }
  // "occlusion", "shapley", "query-shapley" or "custom".
  std::string_view name() const noexcept;
  const std::vector<Query>& queries() const noexcept { return queries_; }
  Strictness strictness() const noexcept { return strictness_; }

  // Materializes eta on d's support. The query-set rule in strict mode throws
  // UncoveredSubset when a subset with mu_L != 0 is covered by no query.
  ResolvedWeights Resolve(const MultiOrderDecomposition& d) const;

 private:
  Rule rule_ = Rule::kOcclusion;
  std::vector<Query> queries_;
  Strictness strictness_ = Strictness::kStrict;
  std::map<std::uint64_t, double> table_;
};

// sum_L eta_L * mu_L * lambda_L for a filter vector on d's support.
double WeightedFilterSum(const MultiOrderDecomposition& d,
                         std::span<const double> eta,
                         const FilterVector& lambda);

double QueryRelevance(const MultiOrderDecomposition& d, const Query& q,
                      const WeightVector& eta);

std::vector<double> QueryRelevances(const MultiOrderDecomposition& d,
                                    std::span<const Query> queries,
                                    const WeightVector& eta);

// Relevance of every singleton presence query under classic Shapley weights.
std::vector<double> ShapleyValues(const MultiOrderDecomposition& d);

struct QuerySetShapleyResult {
  std::vector<double> values;
  double uncovered_mass = 0.0;
};

QuerySetShapleyResult QuerySetShapleyValues(const MultiOrderDecomposition& d,
                                            std::span<const Query> queries,
                                            Strictness strictness =
                                                Strictness::kStrict);

}  // namespace symq

#endif  // SYMQ_RELEVANCE_HPP_
