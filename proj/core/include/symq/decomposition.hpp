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

// Multi-order decompositions f(X) = sum_L mu_L, built either from Harsanyi
// dividends of an oracle or from externally computed walk relevances.

#ifndef SYMQ_DECOMPOSITION_HPP_
#define SYMQ_DECOMPOSITION_HPP_

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "symq/lattice.hpp"
#include "symq/oracle.hpp"

namespace symq {

enum class DecompositionSource { kPerturbation, kPropagationWalks };

struct MultiOrderDecomposition {
  LatticeSupport support;
  std::vector<double> mu;  // one term per support position
  DecompositionSource source = DecompositionSource::kPerturbation;
  // v(N), recorded for full perturbation decompositions.
  std::optional<double> conserved_total;

  double total() const;
  double at(std::uint64_t subset) const;  // 0 for non-members
};

struct WalkRelevance {
  std::vector<int> walk;  // ordered, may repeat features
  double relevance = 0.0;
};

struct WalkRelevanceSet {
  int n = 0;
  std::vector<WalkRelevance> entries;
};

// Newline-delimited JSON, one {"walk": [...], "relevance": <float>} per line.
// Blank lines are skipped. Throws InvalidArgument with the line number, and
// WalkIndexOutOfRange for indices outside [0, n).
WalkRelevanceSet ParseWalkRelevances(std::string_view text, int n);
WalkRelevanceSet LoadWalkRelevances(const std::filesystem::path& path, int n);

// Harsanyi dividends of the oracle on `support`. Full supports use one batch
// evaluation of all 2^n subsets and the fast transform; truncated supports
// only evaluate subsets up to the truncation order.
MultiOrderDecomposition DecomposePerturbation(ValueOracle& oracle,
                                              const LatticeSupport& support);

// mu_L = sum of R_W over walks with set(W) = L. Duplicate walks accumulate.
MultiOrderDecomposition DecomposeFromWalks(const WalkRelevanceSet& walks,
                                           const LatticeSupport& support);

// Builds the subgraph relevance R_S (sum of R_W over walks whose features all
// lie in S) by direct enumeration, takes its Harsanyi dividends and returns
// the largest deviation from the per-set walk sums. n <= 12.
double WalkEquivalenceError(const WalkRelevanceSet& walks, int n);

// |sum_L mu_L - v(N)|. On truncated supports this is the mass carried by the
// omitted orders.
double ConservationResidual(const MultiOrderDecomposition& d,
                            ValueOracle& oracle);

}  // namespace symq

#endif  // SYMQ_DECOMPOSITION_HPP_
