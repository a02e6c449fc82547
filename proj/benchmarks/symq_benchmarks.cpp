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

#include <benchmark/benchmark.h>

#include <vector>

#include "symq/decomposition.hpp"
#include "symq/flipping.hpp"
#include "symq/lattice.hpp"
#include "symq/oracle.hpp"
#include "symq/random.hpp"
#include "symq/relevance.hpp"
#include "symq/search.hpp"

namespace {

std::vector<double> RandomValues(std::size_t size, std::uint64_t seed) {
  symq::Rng rng(seed);
  std::vector<double> v(size);
  for (double& x : v) x = rng.normal();
  return v;
}

void BM_MobiusFull(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const symq::LatticeSupport support = symq::LatticeSupport::Full(n);
  const std::vector<double> values = RandomValues(support.size(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(symq::MobiusTransform(values, support));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(support.size()));
}
BENCHMARK(BM_MobiusFull)->Arg(10)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MobiusTruncated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const symq::LatticeSupport support = symq::LatticeSupport::Truncated(n, 4);
  const std::vector<double> values = RandomValues(support.size(), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(symq::MobiusTransform(values, support));
  }
}
BENCHMARK(BM_MobiusTruncated)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_DecomposeFullN20(benchmark::State& state) {
  const symq::MultilinearGame game = symq::RandomMultilinearGame(20, 3, 3, 0.05);
  for (auto _ : state) {
    symq::ValueOracle oracle = symq::ValueOracle::FromSynthetic(game);
    benchmark::DoNotOptimize(symq::DecomposePerturbation(
        oracle, symq::LatticeSupport::Full(20)));
  }
}
BENCHMARK(BM_DecomposeFullN20)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_QueryRelevance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  symq::ValueOracle oracle =
      symq::ValueOracle::FromSynthetic(symq::RandomMultilinearGame(n, 3, 4));
  const symq::MultiOrderDecomposition d =
      symq::DecomposePerturbation(oracle, symq::LatticeSupport::Full(n));
  const symq::Query q = symq::ParseQuery("{0} & !{1,2} & {3}");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        symq::QueryRelevance(d, q, symq::WeightVector::ClassicShapley()));
  }
}
BENCHMARK(BM_QueryRelevance)->Arg(10)->Arg(16);

void BM_Search(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  symq::ValueOracle oracle = symq::ValueOracle::FromSynthetic(
      symq::PlantedQueryGame{n, symq::ParseQuery("{1} & !{4}"), 1.0, 5, 0.01});
  const symq::MultiOrderDecomposition d =
      symq::DecomposePerturbation(oracle, symq::LatticeSupport::Full(n));
  symq::QuerySpaceSpec spec;
  spec.atoms = symq::SingletonAtoms(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(symq::FindBestQueries(
        d, spec, symq::WeightVector::Occlusion(), 10));
  }
}
BENCHMARK(BM_Search)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SymbXaiOrder(benchmark::State& state) {
  symq::ValueOracle oracle =
      symq::ValueOracle::FromSynthetic(symq::RandomMultilinearGame(10, 3, 6));
  const symq::MultiOrderDecomposition d =
      symq::DecomposePerturbation(oracle, symq::LatticeSupport::Full(10));
  for (auto _ : state) {
    benchmark::DoNotOptimize(symq::SymbXaiOrder(
        d, symq::FlipTask::kRemoval, symq::FlipObjective::kMinimize));
  }
}
BENCHMARK(BM_SymbXaiOrder)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
