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

// Search for the query whose filter vector best matches a decomposition,
// scored by eta-weighted correlation.

#ifndef SYMQ_SEARCH_HPP_
#define SYMQ_SEARCH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symq/decomposition.hpp"
#include "symq/query.hpp"
#include "symq/relevance.hpp"

namespace symq {

inline constexpr std::size_t kDefaultMaxQueries = 1'000'000;

struct QuerySpaceSpec {
  // Candidate feature sets; each literal is one of these or its negation.
  std::vector<std::uint64_t> atoms;
  // Maximum number of '&' per query; queries have 1..max_conjunctions+1
  // literals over distinct atoms.
  int max_conjunctions = 2;
  bool allow_negated_literals = true;
  // Atoms within one query must be pairwise disjoint.
  bool disjoint_literals = true;
  // Drop atoms that are not contiguous index ranges.
  bool consecutive_atoms_only = false;
  std::size_t max_queries = kDefaultMaxQueries;
};

// {0}, {1}, ..., {n-1}.
std::vector<std::uint64_t> SingletonAtoms(int n);
// Every contiguous range {i, ..., j} with j - i + 1 <= max_length.
std::vector<std::uint64_t> ConsecutiveAtoms(int n, int max_length);

// All conjunctions allowed by the spec, canonicalized, deduplicated and
// ordered by literal count. Throws EmptyQuerySpace, SpaceTooLarge,
// IndexOutOfRange.
std::vector<Query> GenerateQuerySpace(const QuerySpaceSpec& spec, int n);

// corr_eta(x, y) = cov_eta(x, y) / sqrt(var_eta(x) var_eta(y)) with
// E_eta[x] = sum_i eta_i x_i / sum_i eta_i. Returns 0 when either variance
// is below 1e-12. Throws ShapeMismatch and AllWeightsZero.
double WeightedCorrelation(std::span<const double> x, std::span<const double> y,
                           std::span<const double> eta);
double WeightedCorrelation(const FilterVector& lambda,
                           std::span<const double> mu,
                           std::span<const double> eta);

struct RankedQuery {
  Query query;
  std::string text;  // canonical string
  double score = 0.0;
};

struct SearchResult {
  std::vector<RankedQuery> ranked;  // descending score, ties by text
  std::string weights;              // weight rule used in the correlation
  SupportMode support;
  std::size_t space_size = 0;
};

// Scores every query of the space against d. The empty set is left out of
// the correlation: its term is pinned to 0 by baseline normalization and
// carries no attribution.
SearchResult FindBestQueries(const MultiOrderDecomposition& d,
                             const QuerySpaceSpec& spec,
                             const WeightVector& eta, std::size_t top_k);

}  // namespace symq

#endif  // SYMQ_SEARCH_HPP_
