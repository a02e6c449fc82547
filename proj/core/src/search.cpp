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

#include "symq/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <optional>
#include <unordered_set>

#include "symq/error.hpp"

namespace symq {
namespace {

constexpr double kDegenerateVariance = 1e-12;

struct Literal {
  std::size_t atom;
  bool negated;
};

struct Candidate {
  std::vector<Literal> literals;
  std::optional<Query> query;
  std::string text;
};

bool IsContiguous(std::uint64_t bits) {
  const std::uint64_t shifted = bits >> std::countr_zero(bits);
  return (shifted & (shifted + 1)) == 0;
}

std::vector<std::uint64_t> UsableAtoms(const QuerySpaceSpec& spec, int n) {
  const std::uint64_t limit =
      n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::vector<std::uint64_t> atoms;
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t a : spec.atoms) {
    if (a == 0) {
      throw Error(ErrorCode::kInvalidArgument, "query space has an empty atom");
    }
    if ((a & ~limit) != 0) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "atom {" + SubsetKey(a) + "} outside [0, " +
                      std::to_string(n) + ")");
    }
    if (spec.consecutive_atoms_only && !IsContiguous(a)) continue;
    if (seen.insert(a).second) atoms.push_back(a);
  }
  if (atoms.empty()) {
    throw Error(ErrorCode::kEmptyQuerySpace, "query space has no usable atoms");
  }
  return atoms;
}

// Breadth-first by literal count; within a count, atom combinations in
// lexicographic index order, then sign patterns.
std::vector<Candidate> GenerateCandidates(const QuerySpaceSpec& spec, int n) {
  if (spec.max_conjunctions < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_conjunctions must be non-negative");
  }
  const std::vector<std::uint64_t> atoms = UsableAtoms(spec, n);
  const std::size_t max_literals = std::min<std::size_t>(
      static_cast<std::size_t>(spec.max_conjunctions) + 1, atoms.size());

  std::vector<Candidate> out;
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> combo;

  auto emit = [&](const std::vector<std::size_t>& chosen) {
    const std::size_t patterns =
        spec.allow_negated_literals ? (std::size_t{1} << chosen.size()) : 1;
    for (std::size_t signs = 0; signs < patterns; ++signs) {
      Candidate c;
      std::optional<Query> q;
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        const bool negated = ((signs >> i) & 1U) != 0;
        c.literals.push_back({chosen[i], negated});
        Query lit = Query::Atom(atoms[chosen[i]]);
        if (negated) lit = Query::Not(lit);
        q = q ? Query::And(*q, lit) : lit;
      }
      c.query = Canonicalize(*q);
      c.text = CanonicalString(*c.query);
      if (!seen.insert(c.text).second) continue;
      if (out.size() >= spec.max_queries) {
        throw Error(ErrorCode::kSpaceTooLarge,
                    "query space exceeds the cap of " +
                        std::to_string(spec.max_queries) + " queries");
      }
      out.push_back(std::move(c));
    }
  };

  // Depth-first extension of increasing atom index lists of a fixed length.
  std::function<void(std::size_t, std::size_t, std::uint64_t)> extend =
      [&](std::size_t length, std::size_t next, std::uint64_t used) {
        if (combo.size() == length) {
          emit(combo);
          return;
        }
        for (std::size_t a = next; a < atoms.size(); ++a) {
          if (spec.disjoint_literals && (atoms[a] & used) != 0) continue;
          combo.push_back(a);
          extend(length, a + 1, used | atoms[a]);
          combo.pop_back();
        }
      };
  for (std::size_t length = 1; length <= max_literals; ++length) {
    extend(length, 0, 0);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyQuerySpace, "query space is empty");
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> SingletonAtoms(int n) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(std::uint64_t{1} << i);
  return out;
}

std::vector<std::uint64_t> ConsecutiveAtoms(int n, int max_length) {
  std::vector<std::uint64_t> out;
  for (int length = 1; length <= std::min(n, max_length); ++length) {
    const std::uint64_t run = length >= 64 ? ~std::uint64_t{0}
                                           : (std::uint64_t{1} << length) - 1;
    for (int start = 0; start + length <= n; ++start) {
      out.push_back(run << start);
    }
  }
  return out;
}

std::vector<Query> GenerateQuerySpace(const QuerySpaceSpec& spec, int n) {
  std::vector<Query> out;
  for (Candidate& c : GenerateCandidates(spec, n)) {
    out.push_back(std::move(*c.query));
  }
  return out;
}

double WeightedCorrelation(std::span<const double> x, std::span<const double> y,
                           std::span<const double> eta) {
  if (x.size() != y.size() || x.size() != eta.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "correlation inputs have different lengths");
  }
  double w = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    w += eta[i];
    sx += eta[i] * x[i];
    sy += eta[i] * y[i];
  }
  if (w == 0.0) {
    throw Error(ErrorCode::kAllWeightsZero, "correlation weights sum to 0");
  }
  const double mx = sx / w;
  const double my = sy / w;
  double cxy = 0.0;
  double cxx = 0.0;
  double cyy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    cxy += eta[i] * dx * dy;
    cxx += eta[i] * dx * dx;
    cyy += eta[i] * dy * dy;
  }
  cxy /= w;
  cxx /= w;
  cyy /= w;
  if (cxx < kDegenerateVariance || cyy < kDegenerateVariance) return 0.0;
  return std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0);
}

double WeightedCorrelation(const FilterVector& lambda,
                           std::span<const double> mu,
                           std::span<const double> eta) {
  std::vector<double> x(lambda.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = lambda[i] ? 1.0 : 0.0;
  return WeightedCorrelation(x, mu, eta);
}

SearchResult FindBestQueries(const MultiOrderDecomposition& d,
                             const QuerySpaceSpec& spec,
                             const WeightVector& eta, std::size_t top_k) {
  if (top_k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");
  }
  const LatticeSupport& support = d.support;
  std::vector<Candidate> candidates = GenerateCandidates(spec, support.n());

  std::vector<double> weights = eta.Resolve(d).eta;
  weights[0] = 0.0;

  // Moments of mu are shared by every query; per query only the weighted
  // mass and weighted mu-sum under the filter are needed.
  double w = 0.0;
  double smu = 0.0;
  for (std::size_t p = 0; p < weights.size(); ++p) {
    w += weights[p];
    smu += weights[p] * d.mu[p];
  }
  if (w == 0.0) {
    throw Error(ErrorCode::kAllWeightsZero, "correlation weights sum to 0");
  }
  const double mean_mu = smu / w;
  double var_mu = 0.0;
  std::vector<double> centered(d.mu.size());
  for (std::size_t p = 0; p < weights.size(); ++p) {
    centered[p] = d.mu[p] - mean_mu;
    var_mu += weights[p] * centered[p] * centered[p];
  }
  var_mu /= w;

  std::vector<std::uint64_t> atoms = UsableAtoms(spec, support.n());
  std::vector<FilterVector> presence;
  presence.reserve(atoms.size());
  for (std::uint64_t a : atoms) presence.push_back(PresenceFilter(a, support));

  std::vector<RankedQuery> scored;
  scored.reserve(candidates.size());
  for (Candidate& c : candidates) {
    FilterVector lambda = c.literals.front().negated
                              ? ~presence[c.literals.front().atom]
                              : presence[c.literals.front().atom];
    for (std::size_t i = 1; i < c.literals.size(); ++i) {
      const Literal& lit = c.literals[i];
      lambda &= lit.negated ? ~presence[lit.atom] : presence[lit.atom];
    }
    double wl = 0.0;
    double cov = 0.0;
    const auto words = lambda.words();
    for (std::size_t k = 0; k < words.size(); ++k) {
      for (std::uint64_t bits = words[k]; bits != 0; bits &= bits - 1) {
        const std::size_t p =
            k * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        wl += weights[p];
        cov += weights[p] * centered[p];
      }
    }
    const double mean_l = wl / w;
    const double var_l = mean_l * (1.0 - mean_l);
    cov /= w;
    double score = 0.0;
    if (var_l >= kDegenerateVariance && var_mu >= kDegenerateVariance) {
      score = std::clamp(cov / std::sqrt(var_l * var_mu), -1.0, 1.0);
    }
    scored.push_back({std::move(*c.query), std::move(c.text), score});
  }

  std::sort(scored.begin(), scored.end(),
            [](const RankedQuery& a, const RankedQuery& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.text < b.text;
            });
  SearchResult result;
  result.space_size = scored.size();
  if (scored.size() > top_k) {
    scored.erase(scored.begin() + static_cast<std::ptrdiff_t>(top_k),
                 scored.end());
  }
  result.ranked = std::move(scored);
  result.weights = std::string(eta.name());
  result.support = support.mode();
  return result;
}

}  // namespace symq
