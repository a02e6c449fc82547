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

#include "symq/decomposition.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "symq/error.hpp"

namespace symq {
namespace {

std::uint64_t WalkSet(const std::vector<int>& walk, int n) {
  std::uint64_t bits = 0;
  for (int f : walk) {
    if (f < 0 || f >= n) {
      throw Error(ErrorCode::kWalkIndexOutOfRange,
                  "walk feature " + std::to_string(f) + " outside [0, " +
                      std::to_string(n) + ")");
    }
    bits |= std::uint64_t{1} << f;
  }
  return bits;
}

}  // namespace

double MultiOrderDecomposition::total() const {
  // Neumaier summation; full supports reach 2^24 terms.
  double sum = 0.0;
  double carry = 0.0;
  for (double x : mu) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

double MultiOrderDecomposition::at(std::uint64_t subset) const {
  const auto pos = support.position_of(subset);
  return pos ? mu[*pos] : 0.0;
}

WalkRelevanceSet ParseWalkRelevances(std::string_view text, int n) {
  WalkRelevanceSet out;
  out.n = n;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::kInvalidArgument,
                  "walk file line " + std::to_string(line_no) +
                      " is not valid JSON");
    }
    if (!doc.is_object() || !doc.contains("walk") || !doc["walk"].is_array() ||
        !doc.contains("relevance") || !doc["relevance"].is_number()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "walk file line " + std::to_string(line_no) +
                      " needs \"walk\" (array) and \"relevance\" (number)");
    }
    WalkRelevance entry;
    for (const auto& f : doc["walk"]) {
      if (!f.is_number_integer()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "walk file line " + std::to_string(line_no) +
                        " has a non-integer walk entry");
      }
      entry.walk.push_back(f.get<int>());
    }
    if (entry.walk.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "walk file line " + std::to_string(line_no) +
                      " has an empty walk");
    }
    entry.relevance = doc["relevance"].get<double>();
    if (!std::isfinite(entry.relevance)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "walk file line " + std::to_string(line_no) +
                      " has a non-finite relevance");
    }
    WalkSet(entry.walk, n);
    out.entries.push_back(std::move(entry));
    if (end == text.size()) break;
  }
  return out;
}

WalkRelevanceSet LoadWalkRelevances(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open walk file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseWalkRelevances(buffer.str(), n);
}

MultiOrderDecomposition DecomposePerturbation(ValueOracle& oracle,
                                              const LatticeSupport& support) {
  if (oracle.n() != support.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "oracle has " + std::to_string(oracle.n()) +
                    " features but the support has " +
                    std::to_string(support.n()));
  }
  const std::vector<double> values = oracle.batch_values(support.masks());
  MultiOrderDecomposition d;
  d.support = support;
  d.mu = MobiusTransform(values, support);
  d.source = DecompositionSource::kPerturbation;
  if (support.is_full()) d.conserved_total = values.back();
  return d;
}

MultiOrderDecomposition DecomposeFromWalks(const WalkRelevanceSet& walks,
                                           const LatticeSupport& support) {
  if (walks.n != support.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "walk set has " + std::to_string(walks.n) +
                    " features but the support has " +
                    std::to_string(support.n()));
  }
  MultiOrderDecomposition d;
  d.support = support;
  d.mu.assign(support.size(), 0.0);
  d.source = DecompositionSource::kPropagationWalks;
  for (const WalkRelevance& w : walks.entries) {
    const std::uint64_t set = WalkSet(w.walk, walks.n);
    const auto pos = support.position_of(set);
    if (!pos) {
      throw Error(ErrorCode::kWalkOrderExceedsSupport,
                  "walk over {" + SubsetKey(set) + "} has order " +
                      std::to_string(std::popcount(set)) +
                      " but the support stops at " +
                      std::to_string(support.max_order()));
    }
    d.mu[*pos] += w.relevance;
  }
  return d;
}

double WalkEquivalenceError(const WalkRelevanceSet& walks, int n) {
  if (n < 1 || n > 12) {
    throw Error(ErrorCode::kInvalidArgument,
                "walk equivalence check supports 1 <= n <= 12");
  }
  const LatticeSupport support = LatticeSupport::Full(n);
  std::vector<std::uint64_t> walk_sets;
  walk_sets.reserve(walks.entries.size());
  for (const WalkRelevance& w : walks.entries) {
    walk_sets.push_back(WalkSet(w.walk, n));
  }

  // Subgraph relevance: walks composable from features of S.
  std::vector<double> subgraph(support.size(), 0.0);
  for (std::size_t p = 0; p < support.size(); ++p) {
    const std::uint64_t s = support.bits_at(p);
    for (std::size_t i = 0; i < walk_sets.size(); ++i) {
      if ((walk_sets[i] & ~s) == 0) subgraph[p] += walks.entries[i].relevance;
    }
  }
  const std::vector<double> dividends = MobiusTransform(subgraph, support);

  WalkRelevanceSet sized = walks;
  sized.n = n;
  const MultiOrderDecomposition grouped = DecomposeFromWalks(sized, support);
  double worst = 0.0;
  for (std::size_t p = 0; p < support.size(); ++p) {
    worst = std::max(worst, std::abs(dividends[p] - grouped.mu[p]));
  }
  return worst;
}

double ConservationResidual(const MultiOrderDecomposition& d,
                            ValueOracle& oracle) {
  const double v_full = oracle.value(SubsetMask::Full(d.support.n()));
  return std::abs(d.total() - v_full);
}

}  // namespace symq
