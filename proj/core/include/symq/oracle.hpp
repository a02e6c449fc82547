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

// Set-function oracles v(S) = f(X_S) - f(X_{}) over feature subsets.
//
// A backend produces raw model outputs for subsets; ValueOracle subtracts the
// raw value of the empty subset once, caches results and serializes access to
// the backend. How absent features are realized is the backend's business.

#ifndef SYMQ_ORACLE_HPP_
#define SYMQ_ORACLE_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "symq/lattice.hpp"
#include "symq/query.hpp"

namespace symq {

class OracleBackend {
 public:
  virtual ~OracleBackend() = default;

  virtual int n() const = 0;
  virtual std::string name() const = 0;

  // Raw outputs, one per subset, in input order. Called with the oracle's
  // backend lock held.
  virtual std::vector<double> RawValues(
      std::span<const std::uint64_t> subsets) = 0;
};

// Exhaustive or partial table of raw values keyed by subset bits.
struct ValueTable {
  int n = 0;
  std::unordered_map<std::uint64_t, double> values;
};

// Table file format:
//   {"n": <int>, "values": {"<ascending indices, comma separated>": <float>}}
// where "" is the empty set. Throws IoError, InvalidArgument or
// IndexOutOfRange.
ValueTable ParseValueTable(std::string_view json_text);
ValueTable LoadValueTable(const std::filesystem::path& path);
std::string SerializeValueTable(const ValueTable& table);

struct MultilinearGame {
  int n = 0;
  // v(S) = sum of coefficients[T] over T subset of S.
  std::map<std::uint64_t, double> coefficients;
};

struct AdditiveGame {
  std::vector<double> weights;  // v(S) = sum_{i in S} weights[i]
};

// Game whose Moebius transform is signal * lambda(query) plus i.i.d.
// N(0, noise_scale^2) noise on every non-empty subset of the full lattice.
// Requires n <= 24.
struct PlantedQueryGame {
  int n = 0;
  Query query = Query::Atom(1);
  double signal = 1.0;
  std::uint64_t noise_seed = 0;
  double noise_scale = 0.0;
};

using SyntheticGameSpec =
    std::variant<MultilinearGame, AdditiveGame, PlantedQueryGame>;

// Random multilinear game: every subset of size 1..max_order receives a
// coefficient drawn uniformly from [-scale, scale] with probability
// `density`, otherwise 0.
MultilinearGame RandomMultilinearGame(int n, int max_order, std::uint64_t seed,
                                      double density = 1.0,
                                      double scale = 1.0);

struct ExternalOracleOptions {
  // Shell command line of the adapter process.
  std::string command;
  // Per-read idle timeout.
  std::chrono::milliseconds timeout{30000};
  // When set, the adapter's handshake must announce this feature count.
  std::optional<int> expected_n;
};

// Timeout from SYMQ_ORACLE_TIMEOUT_MS, 30000 ms when unset.
std::chrono::milliseconds OracleTimeoutFromEnvironment();

std::unique_ptr<OracleBackend> MakeTableBackend(ValueTable table);
std::unique_ptr<OracleBackend> MakeSyntheticBackend(
    const SyntheticGameSpec& spec);
// Spawns the adapter and performs the handshake. Throws OracleProtocolError
// or OracleTimeout.
std::unique_ptr<OracleBackend> MakeExternalBackend(
    const ExternalOracleOptions& options);

inline constexpr std::size_t kDefaultExternalCacheEntries = std::size_t{1}
                                                            << 22;

// Thread-safe, caching, baseline-normalized view of a backend.
class ValueOracle {
 public:
  // `cache_capacity` bounds the cache with LRU eviction; unbounded when
  // empty.
  explicit ValueOracle(std::unique_ptr<OracleBackend> backend,
                       std::optional<std::size_t> cache_capacity = {});
  ~ValueOracle();
  ValueOracle(ValueOracle&&) noexcept;
  ValueOracle& operator=(ValueOracle&&) noexcept;

  static ValueOracle FromTable(ValueTable table);
  static ValueOracle FromSynthetic(const SyntheticGameSpec& spec);
  // LRU cache of kDefaultExternalCacheEntries unless overridden.
  static ValueOracle FromExternal(
      const ExternalOracleOptions& options,
      std::size_t cache_capacity = kDefaultExternalCacheEntries);

  int n() const;
  std::string name() const;

  // Raw f(X_{}) that is subtracted from every value.
  double raw_baseline();

  // v(S) = raw(S) - raw({}); v({}) == 0 exactly. Throws IndexOutOfRange for
  // subsets outside the feature range and propagates backend errors.
  double value(const SubsetMask& subset);
  double value(std::uint64_t subset);

  // Same results as repeated value(), in input order. Uncached subsets are
  // sent to the backend in one call.
  std::vector<double> batch_values(std::span<const std::uint64_t> subsets);
  std::vector<double> batch_values(std::span<const SubsetMask> subsets);

  // Number of backend evaluations so far (cache misses).
  std::size_t backend_calls() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// Materializes a table by querying every subset in `support` (raw values,
// baseline included).
ValueTable MaterializeTable(ValueOracle& oracle, const LatticeSupport& support);

}  // namespace symq

#endif  // SYMQ_ORACLE_HPP_
