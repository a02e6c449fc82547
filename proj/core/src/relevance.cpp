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

#include "symq/relevance.hpp"

#include <bit>

#include "symq/error.hpp"

namespace symq {

WeightVector WeightVector::Occlusion() { return WeightVector(); }

WeightVector WeightVector::ClassicShapley() {
  WeightVector w;
  w.rule_ = Rule::kClassicShapley;
  return w;
}

WeightVector WeightVector::QuerySetShapley(std::vector<Query> queries,
                                           Strictness strictness) {
  if (queries.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "query-set weights need at least one query");
  }
  WeightVector w;
  w.rule_ = Rule::kQuerySetShapley;
  w.queries_ = std::move(queries);
  w.strictness_ = strictness;
  return w;
}

WeightVector WeightVector::Custom(std::map<std::uint64_t, double> table) {
  WeightVector w;
  w.rule_ = Rule::kCustom;
  w.table_ = std::move(table);
  return w;
}

std::string_view WeightVector::name() const noexcept {
  switch (rule_) {
    case Rule::kOcclusion:
      return "occlusion";
    case Rule::kClassicShapley:
      return "shapley";
    case Rule::kQuerySetShapley:
      return "query-shapley";
    case Rule::kCustom:
      return "custom";
  }
  return "unknown";
}

ResolvedWeights WeightVector::Resolve(const MultiOrderDecomposition& d) const {
  const LatticeSupport& support = d.support;
  ResolvedWeights out;
  out.eta.assign(support.size(), 0.0);
  switch (rule_) {
    case Rule::kOcclusion:
      std::fill(out.eta.begin(), out.eta.end(), 1.0);
      break;
    case Rule::kClassicShapley:
      for (std::size_t p = 1; p < support.size(); ++p) {
        out.eta[p] = 1.0 / std::popcount(support.bits_at(p));
      }
      break;
    case Rule::kCustom:
      for (std::size_t p = 0; p < support.size(); ++p) {
        const auto it = table_.find(support.bits_at(p));
        if (it != table_.end()) out.eta[p] = it->second;
      }
      break;
    case Rule::kQuerySetShapley: {
      std::vector<int> coverage(support.size(), 0);
      for (const Query& q : queries_) {
        const FilterVector lambda = EvaluateFilter(q, support);
        for (std::size_t p = 0; p < support.size(); ++p) {
          if (lambda[p]) ++coverage[p];
        }
      }
      for (std::size_t p = 0; p < support.size(); ++p) {
        if (coverage[p] > 0) {
          out.eta[p] = 1.0 / coverage[p];
          continue;
        }
        if (d.mu[p] == 0.0) continue;
        if (strictness_ == Strictness::kStrict) {
          throw Error(ErrorCode::kUncoveredSubset,
                      "subset {" + SubsetKey(support.bits_at(p)) +
                          "} carries mu = " + std::to_string(d.mu[p]) +
                          " but no query of the set is true on it");
        }
        out.uncovered_mass += d.mu[p];
      }
      break;
    }
  }
  return out;
}

double WeightedFilterSum(const MultiOrderDecomposition& d,
                         std::span<const double> eta,
                         const FilterVector& lambda) {
  if (eta.size() != d.mu.size() || lambda.size() != d.mu.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "weights, filter and decomposition sizes differ");
  }
  double total = 0.0;
  const auto words = lambda.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::uint64_t bits = words[w]; bits != 0; bits &= bits - 1) {
      const std::size_t p = w * 64 + static_cast<std::size_t>(
                                         std::countr_zero(bits));
      total += eta[p] * d.mu[p];
    }
  }
  return total;
}

double QueryRelevance(const MultiOrderDecomposition& d, const Query& q,
                      const WeightVector& eta) {
  const ResolvedWeights weights = eta.Resolve(d);
  return WeightedFilterSum(d, weights.eta, EvaluateFilter(q, d.support));
}

std::vector<double> QueryRelevances(const MultiOrderDecomposition& d,
                                    std::span<const Query> queries,
                                    const WeightVector& eta) {
  const ResolvedWeights weights = eta.Resolve(d);
  std::vector<double> out;
  out.reserve(queries.size());
  for (const Query& q : queries) {
    out.push_back(
        WeightedFilterSum(d, weights.eta, EvaluateFilter(q, d.support)));
  }
  return out;
}

std::vector<double> ShapleyValues(const MultiOrderDecomposition& d) {
  const int n = d.support.n();
  std::vector<Query> singletons;
  singletons.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) singletons.push_back(Query::Atom({i}));
  return QueryRelevances(d, singletons, WeightVector::ClassicShapley());
}

QuerySetShapleyResult QuerySetShapleyValues(const MultiOrderDecomposition& d,
                                            std::span<const Query> queries,
                                            Strictness strictness) {
  const WeightVector eta = WeightVector::QuerySetShapley(
      std::vector<Query>(queries.begin(), queries.end()), strictness);
  const ResolvedWeights weights = eta.Resolve(d);
  QuerySetShapleyResult out;
  out.uncovered_mass = weights.uncovered_mass;
  out.values.reserve(queries.size());
  for (const Query& q : queries) {
    out.values.push_back(
        WeightedFilterSum(d, weights.eta, EvaluateFilter(q, d.support)));
  }
  return out;
}

}  // namespace symq
