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

// Random inputs shared by the unit and acceptance tests.

#ifndef SYMQ_TESTS_GENERATORS_HPP_
#define SYMQ_TESTS_GENERATORS_HPP_

#include <cstdint>
#include <vector>

#include "symq/query.hpp"
#include "symq/random.hpp"

namespace symq::testing {

// Non-empty random feature set over [0, n).
inline std::uint64_t RandomAtom(Rng& rng, int n) {
  std::uint64_t bits = 0;
  while (bits == 0) {
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.3) bits |= std::uint64_t{1} << i;
    }
  }
  return bits;
}

// Random AST of at most `depth` operator levels using all four node kinds.
inline Query RandomQuery(Rng& rng, int n, int depth) {
  const double u = rng.uniform();
  if (depth == 0 || u < 0.3) return Query::Atom(RandomAtom(rng, n));
  if (u < 0.5) return Query::Not(RandomQuery(rng, n, depth - 1));
  if (u < 0.8) {
    return Query::And(RandomQuery(rng, n, depth - 1),
                      RandomQuery(rng, n, depth - 1));
  }
  return Query::Or(RandomQuery(rng, n, depth - 1),
                   RandomQuery(rng, n, depth - 1));
}

// Table of raw values on every subset of [0, n), normal entries.
inline std::vector<double> RandomSetFunction(Rng& rng, int n) {
  std::vector<double> v(std::size_t{1} << n);
  for (double& x : v) x = rng.normal();
  v[0] = 0.0;
  return v;
}

}  // namespace symq::testing

#endif  // SYMQ_TESTS_GENERATORS_HPP_
