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

// Subsets of a feature set N = {0, ..., n-1}, the lattice supports that
// decompositions live on, and the zeta/Moebius transform pair on them.

#ifndef SYMQ_LATTICE_HPP_
#define SYMQ_LATTICE_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symq {

inline constexpr int kMaxFeatures = 64;
inline constexpr int kMaxFullLatticeFeatures = 24;

// A subset of {0, ..., n-1} stored as a bit pattern. Only the lowest n bits
// may be set.
class SubsetMask {
 public:
  constexpr SubsetMask() = default;

  // Throws IndexOutOfRange when `bits` has a bit at or above `n`, and
  // InvalidArgument when n is outside [1, 64].
  SubsetMask(std::uint64_t bits, int n);

  static SubsetMask Empty(int n) { return SubsetMask(0, n); }
  static SubsetMask Full(int n);
  static SubsetMask FromIndices(std::span<const int> indices, int n);

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr int n() const noexcept { return n_; }
  int cardinality() const noexcept { return std::popcount(bits_); }
  bool empty() const noexcept { return bits_ == 0; }
  bool contains(int feature) const noexcept {
    return feature >= 0 && feature < n_ && ((bits_ >> feature) & 1U) != 0;
  }
  bool is_subset_of(const SubsetMask& other) const noexcept {
    return (bits_ & ~other.bits_) == 0;
  }
  bool intersects(const SubsetMask& other) const noexcept {
    return (bits_ & other.bits_) != 0;
  }

  // Feature indices in ascending order.
  std::vector<int> indices() const;

  // Complement with respect to {0, ..., n-1}.
  SubsetMask complement() const;

  SubsetMask with(int feature) const;
  SubsetMask operator|(const SubsetMask& other) const;
  SubsetMask operator&(const SubsetMask& other) const;

  friend constexpr bool operator==(const SubsetMask&,
                                   const SubsetMask&) = default;

 private:
  std::uint64_t bits_ = 0;
  int n_ = 0;
};

// Text form used by every file format: ascending indices joined by commas,
// the empty string for the empty set.
std::string SubsetKey(std::uint64_t bits);
inline std::string SubsetKey(const SubsetMask& mask) {
  return SubsetKey(mask.bits());
}

// Inverse of SubsetKey. Tolerates surrounding whitespace around indices but
// requires them to be ascending and unique. Throws InvalidArgument or
// IndexOutOfRange.
SubsetMask ParseSubsetKey(std::string_view key, int n);

struct SupportMode {
  enum class Kind { kFull, kTruncated };

  Kind kind = Kind::kFull;
  int max_order = 0;  // meaningful for kTruncated only

  static SupportMode Full() { return {Kind::kFull, 0}; }
  static SupportMode Truncated(int k) { return {Kind::kTruncated, k}; }
  bool is_full() const noexcept { return kind == Kind::kFull; }

  friend bool operator==(const SupportMode&, const SupportMode&) = default;
};

// The set of subsets a decomposition is defined on, with a dense position for
// each member. Positions are ordered by cardinality, then by numeric value of
// the bit pattern. The support is always closed under taking subsets, and it
// always contains the empty set at position 0.
//
// Copies are cheap and share the immutable enumeration.
class LatticeSupport {
 public:
  // Empty placeholder with no members; use Enumerate to build a real one.
  LatticeSupport() = default;

  // Throws FullLatticeTooLarge for a full lattice with n > 24 and
  // InvalidOrder for a truncation order outside [1, n].
  static LatticeSupport Enumerate(int n, SupportMode mode);
  static LatticeSupport Full(int n) {
    return Enumerate(n, SupportMode::Full());
  }
  static LatticeSupport Truncated(int n, int k) {
    return Enumerate(n, SupportMode::Truncated(k));
  }

  int n() const noexcept { return n_; }
  SupportMode mode() const noexcept { return mode_; }
  bool is_full() const noexcept { return mode_.is_full(); }
  // Largest cardinality present: n for a full lattice, k when truncated.
  int max_order() const noexcept { return is_full() ? n_ : mode_.max_order; }
  std::size_t size() const noexcept { return masks_ ? masks_->size() : 0; }

  std::uint64_t bits_at(std::size_t position) const {
    return (*masks_)[position];
  }
  SubsetMask mask_at(std::size_t position) const {
    return SubsetMask((*masks_)[position], n_);
  }
  std::span<const std::uint64_t> masks() const noexcept {
    return masks_ ? std::span<const std::uint64_t>(*masks_)
                  : std::span<const std::uint64_t>();
  }

  bool contains(std::uint64_t bits) const noexcept;
  // Dense position of a member subset, std::nullopt for non-members.
  std::optional<std::size_t> position_of(std::uint64_t bits) const noexcept;
  std::optional<std::size_t> position_of(const SubsetMask& mask) const noexcept {
    return position_of(mask.bits());
  }

  // Position of the full set N; only valid when it is a member.
  std::optional<std::size_t> full_set_position() const noexcept;

  friend bool operator==(const LatticeSupport& a, const LatticeSupport& b) {
    return a.n_ == b.n_ && a.mode_ == b.mode_;
  }

 private:
  LatticeSupport(int n, SupportMode mode,
                 std::shared_ptr<const std::vector<std::uint64_t>> masks,
                 std::vector<std::size_t> level_offsets);

  int n_ = 0;
  SupportMode mode_;
  std::shared_ptr<const std::vector<std::uint64_t>> masks_;
  // level_offsets_[c] is the position of the first subset of cardinality c.
  std::vector<std::size_t> level_offsets_;
};

// Binomial coefficient; saturates at UINT64_MAX.
std::uint64_t Binomial(int n, int k) noexcept;

// mu_L = sum_{S subset of L} (-1)^{|L|-|S|} values_S for every member L.
// Throws ShapeMismatch when values.size() != support.size().
std::vector<double> MobiusTransform(std::span<const double> values,
                                    const LatticeSupport& support);

// v_L = sum_{S subset of L} mu_S for every member L. Inverse of
// MobiusTransform on every support. Throws ShapeMismatch.
std::vector<double> ZetaTransform(std::span<const double> mu,
                                  const LatticeSupport& support);

}  // namespace symq

#endif  // SYMQ_LATTICE_HPP_
