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

#include "symq/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <list>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "symq/error.hpp"
#include "symq/random.hpp"

namespace symq {
namespace {

using nlohmann::json;

std::uint64_t LowBits(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

class TableBackend : public OracleBackend {
 public:
  explicit TableBackend(ValueTable table) : table_(std::move(table)) {}

  int n() const override { return table_.n; }
  std::string name() const override { return "table"; }

  std::vector<double> RawValues(
      std::span<const std::uint64_t> subsets) override {
    std::vector<double> out;
    out.reserve(subsets.size());
    for (std::uint64_t s : subsets) {
      const auto it = table_.values.find(s);
      if (it == table_.values.end()) {
        throw Error(ErrorCode::kMissingTableEntry,
                    "table has no value for subset {" + SubsetKey(s) + "}");
      }
      out.push_back(it->second);
    }
    return out;
  }

 private:
  ValueTable table_;
};

class MultilinearBackend : public OracleBackend {
 public:
  explicit MultilinearBackend(const MultilinearGame& game) : n_(game.n) {
    terms_.reserve(game.coefficients.size());
    for (const auto& [bits, c] : game.coefficients) {
      if ((bits & ~LowBits(n_)) != 0) {
        throw Error(ErrorCode::kIndexOutOfRange,
                    "coefficient subset {" + SubsetKey(bits) +
                        "} outside the feature range");
      }
      if (!std::isfinite(c)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "coefficient for {" + SubsetKey(bits) + "} is not finite");
      }
      if (c != 0.0) terms_.emplace_back(bits, c);
    }
  }

  int n() const override { return n_; }
  std::string name() const override { return "multilinear"; }

  std::vector<double> RawValues(
      std::span<const std::uint64_t> subsets) override {
    std::vector<double> out;
    out.reserve(subsets.size());
    for (std::uint64_t s : subsets) {
      double total = 0.0;
      for (const auto& [bits, c] : terms_) {
        if ((bits & ~s) == 0) total += c;
      }
      out.push_back(total);
    }
    return out;
  }

 private:
  int n_;
  std::vector<std::pair<std::uint64_t, double>> terms_;
};

class AdditiveBackend : public OracleBackend {
 public:
  explicit AdditiveBackend(std::vector<double> weights)
      : weights_(std::move(weights)) {
    if (weights_.empty() || weights_.size() > kMaxFeatures) {
      throw Error(ErrorCode::kInvalidArgument,
                  "additive game needs 1 to 64 weights");
    }
  }

  int n() const override { return static_cast<int>(weights_.size()); }
  std::string name() const override { return "additive"; }

  std::vector<double> RawValues(
      std::span<const std::uint64_t> subsets) override {
    std::vector<double> out;
    out.reserve(subsets.size());
    for (std::uint64_t s : subsets) {
      double total = 0.0;
      for (std::uint64_t b = s; b != 0; b &= b - 1) {
        total += weights_[static_cast<std::size_t>(std::countr_zero(b))];
      }
      out.push_back(total);
    }
    return out;
  }

 private:
  std::vector<double> weights_;
};

class PlantedQueryBackend : public OracleBackend {
 public:
  explicit PlantedQueryBackend(const PlantedQueryGame& game)
      : support_(LatticeSupport::Full(game.n)) {
    const FilterVector lambda = EvaluateFilter(game.query, support_);
    Rng rng(game.noise_seed);
    std::vector<double> mu(support_.size(), 0.0);
    for (std::size_t p = 1; p < mu.size(); ++p) {
      mu[p] = game.signal * (lambda[p] ? 1.0 : 0.0);
      if (game.noise_scale != 0.0) mu[p] += game.noise_scale * rng.normal();
    }
    values_ = ZetaTransform(mu, support_);
  }

  int n() const override { return support_.n(); }
  std::string name() const override { return "planted-query"; }

  std::vector<double> RawValues(
      std::span<const std::uint64_t> subsets) override {
    std::vector<double> out;
    out.reserve(subsets.size());
    for (std::uint64_t s : subsets) out.push_back(values_[*support_.position_of(s)]);
    return out;
  }

 private:
  LatticeSupport support_;
  std::vector<double> values_;
};

// LRU or unbounded map from subset bits to normalized values.
class ValueCache {
 public:
  explicit ValueCache(std::optional<std::size_t> capacity)
      : capacity_(capacity) {}

  std::optional<double> Get(std::uint64_t key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    if (capacity_) recency_.splice(recency_.begin(), recency_, it->second.second);
    return it->second.first;
  }

  void Put(std::uint64_t key, double value) {
    if (capacity_ && *capacity_ == 0) return;
    const auto it = entries_.find(key);
    if (it != entries_.end()) {
      it->second.first = value;
      return;
    }
    std::list<std::uint64_t>::iterator pos;
    if (capacity_) {
      if (entries_.size() >= *capacity_) {
        entries_.erase(recency_.back());
        recency_.pop_back();
      }
      recency_.push_front(key);
      pos = recency_.begin();
    }
    entries_.emplace(key, std::make_pair(value, pos));
  }

 private:
  std::optional<std::size_t> capacity_;
  std::unordered_map<std::uint64_t,
                     std::pair<double, std::list<std::uint64_t>::iterator>>
      entries_;
  std::list<std::uint64_t> recency_;
};

}  // namespace

struct ValueOracle::State {
  State(std::unique_ptr<OracleBackend> b, std::optional<std::size_t> capacity)
      : backend(std::move(b)), n(backend->n()), cache(capacity) {}

  std::unique_ptr<OracleBackend> backend;
  int n;
  std::mutex backend_mu;  // guards backend, baseline, calls
  std::optional<double> baseline;
  std::size_t calls = 0;
  std::mutex cache_mu;
  ValueCache cache;

  // Requires backend_mu.
  double BaselineLocked() {
    if (!baseline) {
      const std::uint64_t empty = 0;
      baseline = backend->RawValues(std::span<const std::uint64_t>(&empty, 1))
                     .at(0);
      ++calls;
    }
    return *baseline;
  }
};

ValueOracle::ValueOracle(std::unique_ptr<OracleBackend> backend,
                         std::optional<std::size_t> cache_capacity) {
  if (!backend) {
    throw Error(ErrorCode::kInvalidArgument, "oracle backend is null");
  }
  const int n = backend->n();
  if (n < 1 || n > kMaxFeatures) {
    throw Error(ErrorCode::kInvalidArgument,
                "oracle feature count must be in [1, 64], got " +
                    std::to_string(n));
  }
  state_ = std::make_unique<State>(std::move(backend), cache_capacity);
}

ValueOracle::~ValueOracle() = default;
ValueOracle::ValueOracle(ValueOracle&&) noexcept = default;
ValueOracle& ValueOracle::operator=(ValueOracle&&) noexcept = default;

ValueOracle ValueOracle::FromTable(ValueTable table) {
  return ValueOracle(MakeTableBackend(std::move(table)));
}

ValueOracle ValueOracle::FromSynthetic(const SyntheticGameSpec& spec) {
  return ValueOracle(MakeSyntheticBackend(spec));
}

ValueOracle ValueOracle::FromExternal(const ExternalOracleOptions& options,
                                      std::size_t cache_capacity) {
  return ValueOracle(MakeExternalBackend(options), cache_capacity);
}

int ValueOracle::n() const { return state_->n; }

std::string ValueOracle::name() const { return state_->backend->name(); }

double ValueOracle::raw_baseline() {
  std::lock_guard lock(state_->backend_mu);
  return state_->BaselineLocked();
}

double ValueOracle::value(const SubsetMask& subset) {
  return value(subset.bits());
}

double ValueOracle::value(std::uint64_t subset) {
  return batch_values(std::span<const std::uint64_t>(&subset, 1)).front();
}

std::vector<double> ValueOracle::batch_values(
    std::span<const SubsetMask> subsets) {
  std::vector<std::uint64_t> bits;
  bits.reserve(subsets.size());
  for (const SubsetMask& s : subsets) bits.push_back(s.bits());
  return batch_values(bits);
}

std::vector<double> ValueOracle::batch_values(
    std::span<const std::uint64_t> subsets) {
  const std::uint64_t limit = LowBits(state_->n);
  for (std::uint64_t s : subsets) {
    if ((s & ~limit) != 0) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "subset {" + SubsetKey(s) + "} outside the oracle's " +
                      std::to_string(state_->n) + " features");
    }
  }

  std::vector<double> out(subsets.size(), 0.0);
  std::vector<std::uint64_t> misses;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> miss_slots;
  {
    std::lock_guard lock(state_->cache_mu);
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      if (subsets[i] == 0) continue;
      if (const auto hit = state_->cache.Get(subsets[i])) {
        out[i] = *hit;
        continue;
      }
      auto& slots = miss_slots[subsets[i]];
      if (slots.empty()) misses.push_back(subsets[i]);
      slots.push_back(i);
    }
  }
  if (misses.empty()) return out;

  std::vector<double> raw;
  double baseline = 0.0;
  {
    std::lock_guard lock(state_->backend_mu);
    baseline = state_->BaselineLocked();
    raw = state_->backend->RawValues(misses);
    state_->calls += misses.size();
  }
  if (raw.size() != misses.size()) {
    throw Error(ErrorCode::kOracleProtocolError,
                "backend returned " + std::to_string(raw.size()) +
                    " values for " + std::to_string(misses.size()) +
                    " subsets");
  }

  std::lock_guard lock(state_->cache_mu);
  for (std::size_t m = 0; m < misses.size(); ++m) {
    const double v = raw[m] - baseline;
    state_->cache.Put(misses[m], v);
    for (std::size_t slot : miss_slots[misses[m]]) out[slot] = v;
  }
  return out;
}

std::size_t ValueOracle::backend_calls() const {
  std::lock_guard lock(state_->backend_mu);
  return state_->calls;
}

ValueTable ParseValueTable(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("table is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() ||
      !doc.contains("values") || !doc["values"].is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                "table must be an object with integer \"n\" and object "
                "\"values\"");
  }
  ValueTable table;
  table.n = doc["n"].get<int>();
  if (table.n < 1 || table.n > kMaxFeatures) {
    throw Error(ErrorCode::kInvalidArgument,
                "table \"n\" must be in [1, 64]");
  }
  for (const auto& [key, value] : doc["values"].items()) {
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "table value for \"" + key + "\" is not a finite number");
    }
    table.values[ParseSubsetKey(key, table.n).bits()] = value.get<double>();
  }
  return table;
}

ValueTable LoadValueTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                "cannot open table file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseValueTable(buffer.str());
}

std::string SerializeValueTable(const ValueTable& table) {
  std::vector<std::uint64_t> keys;
  keys.reserve(table.values.size());
  for (const auto& [bits, v] : table.values) keys.push_back(bits);
  std::sort(keys.begin(), keys.end(), [](std::uint64_t a, std::uint64_t b) {
    const int ca = std::popcount(a);
    const int cb = std::popcount(b);
    return ca != cb ? ca < cb : a < b;
  });
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (std::uint64_t k : keys) values[SubsetKey(k)] = table.values.at(k);
  nlohmann::ordered_json doc;
  doc["n"] = table.n;
  doc["values"] = std::move(values);
  return doc.dump();
}

MultilinearGame RandomMultilinearGame(int n, int max_order, std::uint64_t seed,
                                      double density, double scale) {
  const LatticeSupport support = LatticeSupport::Truncated(n, max_order);
  Rng rng(seed);
  MultilinearGame game;
  game.n = n;
  for (std::size_t p = 1; p < support.size(); ++p) {
    const double keep = rng.uniform();
    const double c = rng.uniform(-scale, scale);
    if (keep < density) game.coefficients[support.bits_at(p)] = c;
  }
  return game;
}

std::unique_ptr<OracleBackend> MakeTableBackend(ValueTable table) {
  if (table.n < 1 || table.n > kMaxFeatures) {
    throw Error(ErrorCode::kInvalidArgument,
                "table feature count must be in [1, 64]");
  }
  for (const auto& [bits, v] : table.values) {
    if ((bits & ~LowBits(table.n)) != 0) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "table subset {" + SubsetKey(bits) +
                      "} outside the feature range");
    }
  }
  return std::make_unique<TableBackend>(std::move(table));
}

std::unique_ptr<OracleBackend> MakeSyntheticBackend(
    const SyntheticGameSpec& spec) {
  return std::visit(
      [](const auto& game) -> std::unique_ptr<OracleBackend> {
        using T = std::decay_t<decltype(game)>;
        if constexpr (std::is_same_v<T, MultilinearGame>) {
          if (game.n < 1 || game.n > kMaxFeatures) {
            throw Error(ErrorCode::kInvalidArgument,
                        "multilinear game needs 1 to 64 features");
          }
          return std::make_unique<MultilinearBackend>(game);
        } else if constexpr (std::is_same_v<T, AdditiveGame>) {
          return std::make_unique<AdditiveBackend>(game.weights);
        } else {
          return std::make_unique<PlantedQueryBackend>(game);
        }
      },
      spec);
}

std::chrono::milliseconds OracleTimeoutFromEnvironment() {
  const char* raw = std::getenv("SYMQ_ORACLE_TIMEOUT_MS");
  if (raw == nullptr || *raw == '\0') return std::chrono::milliseconds(30000);
  char* end = nullptr;
  const long long ms = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("SYMQ_ORACLE_TIMEOUT_MS must be a positive "
                            "integer, got \"") +
                    raw + "\"");
  }
  return std::chrono::milliseconds(ms);
}

ValueTable MaterializeTable(ValueOracle& oracle,
                            const LatticeSupport& support) {
  if (support.n() != oracle.n()) {
    throw Error(ErrorCode::kShapeMismatch,
                "support and oracle disagree on the feature count");
  }
  const std::vector<double> values = oracle.batch_values(support.masks());
  const double baseline = oracle.raw_baseline();
  ValueTable table;
  table.n = oracle.n();
  for (std::size_t p = 0; p < support.size(); ++p) {
    table.values[support.bits_at(p)] = values[p] + baseline;
  }
  return table;
}

}  // namespace symq
