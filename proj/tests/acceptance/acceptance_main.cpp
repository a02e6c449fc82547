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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Every reference value comes from the
// brute-force oracles in tests/support, not from the library code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "generators.hpp"
#include "symq/decomposition.hpp"
#include "symq/error.hpp"
#include "symq/flipping.hpp"
#include "symq/lattice.hpp"
#include "symq/oracle.hpp"
#include "symq/query.hpp"
#include "symq/random.hpp"
#include "symq/relevance.hpp"
#include "symq/search.hpp"

#ifdef SYMQ_HAVE_CLI
#include "cli.hpp"
#include "golden_cases.hpp"
#endif

namespace symq {
namespace {

// Pinned tolerances.
constexpr double kExact = 1e-9;
constexpr double kScoreOne = 1e-12;
constexpr double kFullN20Seconds = 5.0;
constexpr double kFlipSuiteSeconds = 120.0;
constexpr int kNoisyRecoveryMin = 90;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void Report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c);
  return buffer;
}

ValueTable TableFrom(const std::vector<double>& raw, int n) {
  ValueTable t{n, {}};
  for (std::uint64_t s = 0; s < raw.size(); ++s) t.values[s] = raw[s];
  return t;
}

ValueOracle RandomTableOracle(int n, std::uint64_t seed) {
  Rng rng(seed);
  return ValueOracle::FromTable(TableFrom(testing::RandomSetFunction(rng, n), n));
}

Outcome MobiusCorrectness() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MultilinearGame game = RandomMultilinearGame(10, 10, seed);
    ValueOracle oracle = ValueOracle::FromSynthetic(game);
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(10));
    for (std::size_t p = 1; p < d.support.size(); ++p) {
      const std::uint64_t l = d.support.bits_at(p);
      const auto it = game.coefficients.find(l);
      const double c = it == game.coefficients.end() ? 0.0 : it->second;
      worst = std::max(worst, std::abs(d.mu[p] - c));
    }
    worst = std::max(worst, std::abs(d.mu[0]));
  }

  Rng rng(2020);
  const std::vector<double> raw = testing::RandomSetFunction(rng, 20);
  ValueOracle big = ValueOracle::FromTable(TableFrom(raw, 20));
  const Clock::time_point start = Clock::now();
  const MultiOrderDecomposition d =
      DecomposePerturbation(big, LatticeSupport::Full(20));
  const double elapsed = Seconds(start);
  // Spot-check the n=20 result against the direct submask sum.
  const auto v = [&](std::uint64_t s) { return raw[s] - raw[0]; };
  double spot = 0.0;
  for (std::uint64_t s : {std::uint64_t{0b1011}, std::uint64_t{0xF0F0},
                          std::uint64_t{0x3FF}, std::uint64_t{0xFFFFF}}) {
    spot = std::max(spot, std::abs(d.at(s) - testing::DirectDividend(v, s)));
  }
  const bool pass = worst < kExact && spot < 1e-6 && elapsed < kFullN20Seconds;
  return {pass, Fmt("n=10 x100 max|mu-c| = %.3g (< 1e-9); n=20 full in %.2fs "
                    "(< 5s), spot error %.3g",
                    worst, elapsed, spot)};
}

Outcome Conservation() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 1 + static_cast<int>(seed % 12);
    ValueOracle oracle = RandomTableOracle(n, 300 + seed);
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(n));
    worst = std::max(worst, ConservationResidual(d, oracle));
    worst = std::max(worst, std::abs(d.total() - oracle.value(
                                                     testing::AllOf(n))));
  }
  return {worst < kExact,
          Fmt("100 tables n=1..12, max residual %.3g (< 1e-9)", worst)};
}

Outcome InclusionExclusionAndAbsence() {
  double worst = 0.0;
  int checks = 0;
  const auto one = [](std::uint64_t) { return 1.0; };
  for (std::uint64_t seed = 0; seed < 28; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    ValueOracle oracle = RandomTableOracle(n, 400 + seed);
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(n));
    const auto v = [&](std::uint64_t s) { return oracle.value(s); };
    const std::vector<double> mu = testing::DirectDividends(v, n);
    const WeightVector eta = WeightVector::Occlusion();
    const auto both = [&](const Query& q) {
      const double library = QueryRelevance(d, q, eta);
      const double brute = testing::DirectRelevance(q, mu, one, n);
      worst = std::max(worst, std::abs(library - brute));
      return brute;
    };
    const std::uint64_t all = testing::AllOf(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double lhs =
            both(Query::And(Query::Atom({i}), Query::Atom({j})));
        const double rhs = both(Query::Atom({i})) + both(Query::Atom({j})) -
                           both(Query::Atom({i, j}));
        worst = std::max(worst, std::abs(lhs - rhs));
        ++checks;
      }
    }
    for (std::uint64_t s = 1; s <= all; ++s) {
      worst = std::max(worst, std::abs(both(Query::Not(Query::Atom(s))) -
                                       oracle.value(all & ~s)));
      ++checks;
    }
  }
  return {worst < kExact,
          Fmt("%.0f identities on 28 games n=2..8, max error %.3g (< 1e-9)",
              checks, worst)};
}

Outcome QuerySetConservation() {
  Rng rng(500);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    ValueOracle oracle = RandomTableOracle(n, 600 + trial);
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(n));
    // Random queries plus one that is true exactly where none of them is,
    // so every non-empty subset is covered.
    std::vector<Query> set;
    Query rest = Query::Atom(testing::AllOf(n));
    const int k = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < k; ++i) {
      set.push_back(testing::RandomQuery(rng, n, 3));
      rest = Query::And(rest, Query::Not(set.back()));
    }
    set.push_back(rest);
    const QuerySetShapleyResult r =
        QuerySetShapleyValues(d, set, Strictness::kStrict);
    double total = 0.0;
    for (double x : r.values) total += x;
    worst = std::max(worst, std::abs(total - oracle.value(testing::AllOf(n))));
  }
  return {worst < kExact,
          Fmt("100 strict query sets n=1..8, max |sum A - v(N)| %.3g (< 1e-9)",
              worst)};
}

Outcome ShapleyEquivalence() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 35; ++seed) {
    const int n = 1 + static_cast<int>(seed % 8);
    ValueOracle oracle = RandomTableOracle(n, 700 + seed);
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(n));
    const auto v = [&](std::uint64_t s) { return oracle.value(s); };
    const std::vector<double> expected = testing::PermutationShapley(v, n);
    std::vector<Query> singletons;
    for (int i = 0; i < n; ++i) singletons.push_back(Query::Atom({i}));
    const std::vector<double> got =
        QueryRelevances(d, singletons, WeightVector::ClassicShapley());
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(got[i] - expected[i]));
    }
  }
  return {worst < kExact,
          Fmt("35 games n=1..8 vs permutation formula, max error %.3g "
              "(< 1e-9)",
              worst)};
}

Outcome WalkEquivalence() {
  Rng rng(800);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    std::vector<testing::Walk> walks;
    WalkRelevanceSet set{n, {}};
    const int count = 1 + static_cast<int>(rng.below(30));
    for (int w = 0; w < count; ++w) {
      testing::Walk walk;
      const int length = 1 + static_cast<int>(rng.below(4));
      for (int k = 0; k < length; ++k) {
        walk.nodes.push_back(static_cast<int>(rng.below(n)));
      }
      walk.relevance = rng.normal();
      walks.push_back(walk);
      set.entries.push_back({walk.nodes, walk.relevance});
    }
    const auto r = [&](std::uint64_t s) {
      return testing::SubgraphRelevance(walks, s);
    };
    const auto sums = testing::WalkSums(walks);
    const MultiOrderDecomposition d =
        DecomposeFromWalks(set, LatticeSupport::Full(n));
    for (std::uint64_t s = 0; s <= testing::AllOf(n); ++s) {
      const auto it = sums.find(s);
      const double expected = it == sums.end() ? 0.0 : it->second;
      worst = std::max(worst,
                       std::abs(testing::DirectDividend(r, s) - expected));
      worst = std::max(worst, std::abs(d.at(s) - expected));
    }
    worst = std::max(worst, WalkEquivalenceError(set, n));
  }
  return {worst < kExact,
          Fmt("100 walk sets n=1..8, length<=4, max error %.3g (< 1e-9)",
              worst)};
}

Outcome FilterSemantics() {
  std::size_t queries = 0;
  std::size_t mismatches = 0;
  for (int n = 1; n <= 6; ++n) {
    const LatticeSupport support = LatticeSupport::Full(n);
    std::vector<QuerySpaceSpec> specs(2);
    specs[0].atoms = SingletonAtoms(n);
    specs[0].max_conjunctions = std::min(n - 1, 3);
    specs[1].atoms = ConsecutiveAtoms(n, 3);
    specs[1].max_conjunctions = 1;
    specs[1].disjoint_literals = false;
    for (const QuerySpaceSpec& spec : specs) {
      for (const Query& q : GenerateQuerySpace(spec, n)) {
        ++queries;
        const FilterVector lambda = EvaluateFilter(q, support);
        const FilterVector negated = EvaluateFilter(Query::Not(q), support);
        for (std::size_t p = 0; p < support.size(); ++p) {
          const bool truth = testing::TruthOf(q, support.bits_at(p));
          if (lambda[p] != truth || negated[p] == truth) ++mismatches;
        }
      }
    }
    // Absence rule: !S is true on L exactly when L and S are disjoint.
    for (std::uint64_t s = 1; s <= testing::AllOf(n); ++s) {
      const FilterVector lambda =
          EvaluateFilter(Query::Not(Query::Atom(s)), support);
      for (std::size_t p = 0; p < support.size(); ++p) {
        if (lambda[p] != ((support.bits_at(p) & s) == 0)) ++mismatches;
      }
    }
  }
  std::ostringstream detail;
  detail << queries << " generated queries on n=1..6, " << mismatches
         << " truth-table mismatches (exact)";
  return {mismatches == 0, detail.str()};
}

// Random conjunction of 1..3 literals over distinct singletons.
Query RandomPlanted(Rng& rng, int n) {
  std::vector<int> features(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) features[static_cast<std::size_t>(i)] = i;
  rng.shuffle(std::span<int>(features));
  const int literals = 1 + static_cast<int>(rng.below(3));
  std::optional<Query> q;
  for (int k = 0; k < literals; ++k) {
    Query lit = Query::Atom({features[static_cast<std::size_t>(k)]});
    if (rng.uniform() < 0.5) lit = Query::Not(lit);
    q = q ? Query::And(*q, lit) : lit;
  }
  return Canonicalize(*q);
}

Outcome SearchRecovery() {
  QuerySpaceSpec spec;
  spec.atoms = SingletonAtoms(8);
  spec.max_conjunctions = 2;
  int clean = 0;
  int noisy = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(900 + seed);
    const Query planted = RandomPlanted(rng, 8);
    const std::string text = CanonicalString(planted);
    for (double noise : {0.0, 0.01}) {
      ValueOracle oracle = ValueOracle::FromSynthetic(
          PlantedQueryGame{8, planted, 1.0, seed, noise});
      const MultiOrderDecomposition d =
          DecomposePerturbation(oracle, LatticeSupport::Full(8));
      const SearchResult r =
          FindBestQueries(d, spec, WeightVector::Occlusion(), 1);
      const bool top = r.ranked.front().text == text;
      if (noise == 0.0) {
        if (top && std::abs(r.ranked.front().score - 1.0) < kScoreOne) ++clean;
      } else if (top) {
        ++noisy;
      }
    }
  }
  return {clean == 100 && noisy >= kNoisyRecoveryMin,
          Fmt("noise 0: %.0f/100 at score 1 (need 100); noise 0.01: %.0f/100 "
              "(need >= 90)",
              clean, noisy)};
}

Outcome Flipping() {
  const Clock::time_point start = Clock::now();
  const std::vector<FlipTask> both{FlipTask::kRemoval, FlipTask::kGeneration};

  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ValueOracle oracle =
        ValueOracle::FromSynthetic(RandomMultilinearGame(10, 3, 1000 + seed));
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(10));
    for (FlipTask task : both) {
      for (FlipObjective objective :
           {FlipObjective::kMinimize, FlipObjective::kMaximize}) {
        const GreedyOrder g = SymbXaiOrder(d, task, objective);
        const FlipCurve curve = RunFlip(oracle, g.order, task);
        for (std::size_t j = 0; j < g.predicted.size(); ++j) {
          worst = std::max(worst, std::abs(g.predicted[j] - curve.values[j + 1]));
        }
      }
    }
  }

  double symbxai = 0.0;
  double occlusion = 0.0;
  double random = 0.0;
  const std::vector<FlipTask> removal{FlipTask::kRemoval};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ValueOracle oracle =
        ValueOracle::FromSynthetic(RandomMultilinearGame(10, 3, 2000 + seed));
    const MultiOrderDecomposition d =
        DecomposePerturbation(oracle, LatticeSupport::Full(10));
    const std::vector<FlipMethod> methods{
        SymbXaiMethod(d), FirstOrderMethod("occlusion", OcclusionScores(oracle)),
        RandomMethod(seed, 8)};
    const std::vector<MethodAreas> rows =
        CompareMethods(oracle, methods, removal);
    symbxai += *rows[0].min_aurc / 100.0;
    occlusion += *rows[1].min_aurc / 100.0;
    random += *rows[2].min_aurc / 100.0;
  }
  const double elapsed = Seconds(start);
  const bool pass = worst < kExact && symbxai <= occlusion &&
                    occlusion <= random && elapsed < kFlipSuiteSeconds;
  return {pass,
          Fmt("greedy exactness on 50 games n=10, max error %.3g (< 1e-9); ",
              worst) +
              Fmt("mean min-AURC symbxai %.4f <= occlusion %.4f <= random "
                  "%.4f; ",
                  symbxai, occlusion, random) +
              Fmt("%.2fs (< 120s)", elapsed)};
}

#ifdef SYMQ_HAVE_CLI
Outcome GoldenDeterminism() {
  const std::string golden_dir = SYMQ_GOLDEN_DIR;
  int matched = 0;
  int total = 0;
  std::string failed;
  for (const testing::GoldenCase& c : testing::GoldenCases()) {
    ++total;
    const std::vector<std::string> args =
        testing::ExpandArgs(c.args, golden_dir + "/inputs");
    std::ostringstream out1, out2, err;
    const int s1 = cli::RunCli(args, out1, err);
    const int s2 = cli::RunCli(args, out2, err);
    const std::string expected =
        testing::ReadWholeFile(golden_dir + "/" + c.name + ".json");
    if (s1 == 0 && s2 == 0 && out1.str() == expected &&
        out2.str() == expected) {
      ++matched;
    } else {
      failed += " " + c.name;
    }
  }
  return {matched == total,
          Fmt("%.0f/%.0f CLI golden files byte-identical over two runs",
              matched, total) +
              failed};
}
#endif

}  // namespace
}  // namespace symq

int main() {
  using namespace symq;
  Report("mobius-harsanyi-correctness", MobiusCorrectness);
  Report("conservation-full-support", Conservation);
  Report("inclusion-exclusion-and-absence", InclusionExclusionAndAbsence);
  Report("query-set-conservation", QuerySetConservation);
  Report("classic-shapley-equivalence", ShapleyEquivalence);
  Report("walk-harsanyi-equivalence", WalkEquivalence);
  Report("filter-vector-semantics", FilterSemantics);
  Report("planted-query-search", SearchRecovery);
  Report("input-flipping", Flipping);
#ifdef SYMQ_HAVE_CLI
  Report("cli-golden-determinism", GoldenDeterminism);
#else
  std::printf("FAIL  cli-golden-determinism: built without the CLI\n");
  ++failures;
#endif
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
