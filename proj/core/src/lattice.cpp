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

#include "symq/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

#include "symq/error.hpp"

namespace symq {
namespace {

// Truncated supports larger than this are refused (about 512 MB of masks).
constexpr std::uint64_t kMaxSupportSize = std::uint64_t{1} << 26;

struct BinomialTable {
  std::uint64_t values[kMaxFeatures + 1][kMaxFeatures + 1] = {};
  constexpr BinomialTable() {
    for (int n = 0; n <= kMaxFeatures; ++n) {
      values[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        values[n][k] = values[n - 1][k - 1] + (k < n ? values[n - 1][k] : 0);
      }
    }
  }
};

constexpr BinomialTable kBinomials;

std::uint64_t LowBits(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void CheckFeatureCount(int n) {
  if (n < 1 || n > kMaxFeatures) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature count must be in [1, 64], got " + std::to_string(n));
  }
}

// Next larger integer with the same popcount (Gosper's hack).
std::uint64_t NextCombination(std::uint64_t x) {
  const std::uint64_t smallest = x & (~x + 1);
  const std::uint64_t ripple = x + smallest;
  const std::uint64_t ones = ((x ^ ripple) >> 2) / smallest;
  return ripple | ones;
}

enum class Direction { kMobius, kZeta };

void TransformFull(std::vector<double>& table, int n, Direction dir) {
  const std::size_t total = table.size();
  for (int d = 0; d < n; ++d) {
    const std::size_t bit = std::size_t{1} << d;
    for (std::size_t base = 0; base < total; base += 2 * bit) {
      double* low = table.data() + base;
      double* high = low + bit;
      if (dir == Direction::kMobius) {
        for (std::size_t j = 0; j < bit; ++j) high[j] -= low[j];
      } else {
        for (std::size_t j = 0; j < bit; ++j) high[j] += low[j];
      }
    }
  }
}

std::vector<double> Transform(std::span<const double> input,
                              const LatticeSupport& support, Direction dir) {
  if (input.size() != support.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected " + std::to_string(support.size()) +
                    " values, got " + std::to_string(input.size()));
  }
  const auto masks = support.masks();
  if (support.is_full()) {
    std::vector<double> table(support.size());
    for (std::size_t p = 0; p < masks.size(); ++p) table[masks[p]] = input[p];
    TransformFull(table, support.n(), dir);
    std::vector<double> out(support.size());
    for (std::size_t p = 0; p < masks.size(); ++p) out[p] = table[masks[p]];
    return out;
  }

  // The support is down-closed, so the per-dimension butterfly only ever
  // reads members of the support.
  std::vector<double> out(input.begin(), input.end());
  for (int d = 0; d < support.n(); ++d) {
    const std::uint64_t bit = std::uint64_t{1} << d;
    for (std::size_t p = 1; p < masks.size(); ++p) {
      if ((masks[p] & bit) == 0) continue;
      const std::size_t q = *support.position_of(masks[p] ^ bit);
      if (dir == Direction::kMobius) {
        out[p] -= out[q];
      } else {
        out[p] += out[q];
      }
    }
  }
  return out;
}

}  // namespace

SubsetMask::SubsetMask(std::uint64_t bits, int n) : bits_(bits), n_(n) {
  CheckFeatureCount(n);
  if ((bits & ~LowBits(n)) != 0) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "subset has features outside [0, " + std::to_string(n) + ")");
  }
}

SubsetMask SubsetMask::Full(int n) {
  CheckFeatureCount(n);
  return SubsetMask(LowBits(n), n);
}

SubsetMask SubsetMask::FromIndices(std::span<const int> indices, int n) {
  CheckFeatureCount(n);
  std::uint64_t bits = 0;
  for (int i : indices) {
    if (i < 0 || i >= n) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "feature " + std::to_string(i) + " outside [0, " +
                      std::to_string(n) + ")");
    }
    bits |= std::uint64_t{1} << i;
  }
  return SubsetMask(bits, n);
}

std::vector<int> SubsetMask::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cardinality()));
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(std::countr_zero(b));
  }
  return out;
}

SubsetMask SubsetMask::complement() const {
  return SubsetMask(~bits_ & LowBits(n_), n_);
}

SubsetMask SubsetMask::with(int feature) const {
  if (feature < 0 || feature >= n_) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "feature " + std::to_string(feature) + " outside [0, " +
                    std::to_string(n_) + ")");
  }
  return SubsetMask(bits_ | (std::uint64_t{1} << feature), n_);
}

SubsetMask SubsetMask::operator|(const SubsetMask& other) const {
  return SubsetMask(bits_ | other.bits_, std::max(n_, other.n_));
}

SubsetMask SubsetMask::operator&(const SubsetMask& other) const {
  return SubsetMask(bits_ & other.bits_, std::max(n_, other.n_));
}

std::string SubsetKey(std::uint64_t bits) {
  std::string out;
  for (std::uint64_t b = bits; b != 0; b &= b - 1) {
    if (!out.empty()) out.push_back(',');
    out += std::to_string(std::countr_zero(b));
  }
  return out;
}

SubsetMask ParseSubsetKey(std::string_view key, int n) {
  CheckFeatureCount(n);
  std::uint64_t bits = 0;
  int previous = -1;
  std::size_t pos = 0;
  auto skip_spaces = [&] {
    while (pos < key.size() && (key[pos] == ' ' || key[pos] == '\t')) ++pos;
  };
  skip_spaces();
  if (pos == key.size()) return SubsetMask(0, n);
  while (true) {
    skip_spaces();
    int value = 0;
    const auto [end, ec] =
        std::from_chars(key.data() + pos, key.data() + key.size(), value);
    if (ec != std::errc()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "malformed subset key \"" + std::string(key) + "\"");
    }
    pos = static_cast<std::size_t>(end - key.data());
    if (value < 0 || value >= n) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "feature " + std::to_string(value) + " in subset key \"" +
                      std::string(key) + "\" outside [0, " +
                      std::to_string(n) + ")");
    }
    if (value <= previous) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subset key \"" + std::string(key) +
                      "\" must list strictly ascending indices");
    }
    previous = value;
    bits |= std::uint64_t{1} << value;
    skip_spaces();
    if (pos == key.size()) break;
    if (key[pos] != ',') {
      throw Error(ErrorCode::kInvalidArgument,
                  "malformed subset key \"" + std::string(key) + "\"");
    }
    ++pos;
  }
  return SubsetMask(bits, n);
}

std::uint64_t Binomial(int n, int k) noexcept {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i; split the division so the
    // intermediate product does not overflow unless the result does.
    const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
    const std::uint64_t factor = static_cast<std::uint64_t>(n - k + i) /
                                 (static_cast<std::uint64_t>(i) / g);
    if (__builtin_mul_overflow(result / g, factor, &result)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return result;
}

LatticeSupport::LatticeSupport(
    int n, SupportMode mode,
    std::shared_ptr<const std::vector<std::uint64_t>> masks,
    std::vector<std::size_t> level_offsets)
    : n_(n),
      mode_(mode),
      masks_(std::move(masks)),
      level_offsets_(std::move(level_offsets)) {}

LatticeSupport LatticeSupport::Enumerate(int n, SupportMode mode) {
  CheckFeatureCount(n);
  int top = n;
  if (mode.is_full()) {
    if (n > kMaxFullLatticeFeatures) {
      throw Error(ErrorCode::kFullLatticeTooLarge,
                  "full lattice over " + std::to_string(n) +
                      " features exceeds the cap of " +
                      std::to_string(kMaxFullLatticeFeatures) +
                      "; use a truncated support");
    }
    mode.max_order = 0;
  } else {
    if (mode.max_order < 1 || mode.max_order > n) {
      throw Error(ErrorCode::kInvalidOrder,
                  "truncation order " + std::to_string(mode.max_order) +
                      " outside [1, " + std::to_string(n) + "]");
    }
    top = mode.max_order;
  }

  std::uint64_t total = 0;
  for (int c = 0; c <= top; ++c) {
    total += Binomial(n, c);
    if (total > kMaxSupportSize) {
      throw Error(ErrorCode::kFullLatticeTooLarge,
                  "support with " + std::to_string(n) +
                      " features and order " + std::to_string(top) +
                      " has more than 2^26 subsets");
    }
  }

  auto masks = std::make_shared<std::vector<std::uint64_t>>();
  masks->reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> offsets;
  offsets.reserve(static_cast<std::size_t>(top) + 2);
  for (int c = 0; c <= top; ++c) {
    offsets.push_back(masks->size());
    const std::uint64_t count = Binomial(n, c);
    std::uint64_t x = LowBits(c);
    for (std::uint64_t i = 0; i < count; ++i) {
      masks->push_back(x);
      if (i + 1 < count) x = NextCombination(x);
    }
  }
  offsets.push_back(masks->size());
  return LatticeSupport(n, mode, std::move(masks), std::move(offsets));
}

bool LatticeSupport::contains(std::uint64_t bits) const noexcept {
  return (bits & ~LowBits(n_)) == 0 && std::popcount(bits) <= max_order();
}

std::optional<std::size_t> LatticeSupport::position_of(
    std::uint64_t bits) const noexcept {
  if (!masks_ || !contains(bits)) return std::nullopt;
  // Colexicographic rank among subsets of equal cardinality; for a fixed
  // popcount, colex order coincides with numeric order.
  const int c = std::popcount(bits);
  std::uint64_t rank = 0;
  int i = 1;
  for (std::uint64_t b = bits; b != 0; b &= b - 1, ++i) {
    rank += kBinomials.values[std::countr_zero(b)][i];
  }
  return level_offsets_[static_cast<std::size_t>(c)] +
         static_cast<std::size_t>(rank);
}

std::optional<std::size_t> LatticeSupport::full_set_position() const noexcept {
  return position_of(LowBits(n_));
}

std::vector<double> MobiusTransform(std::span<const double> values,
                                    const LatticeSupport& support) {
  return Transform(values, support, Direction::kMobius);
}

std::vector<double> ZetaTransform(std::span<const double> mu,
                                  const LatticeSupport& support) {
  return Transform(mu, support, Direction::kZeta);
}

}  // namespace symq
