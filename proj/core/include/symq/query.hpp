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

// Logical queries over feature-set atoms and their filter vectors.
//
// Text grammar (whitespace is insignificant):
//
//   expr    := conj ('|' conj)*
//   conj    := unary ('&' unary)*
//   unary   := '!' unary | primary
//   primary := '(' expr ')' | '{' index (',' index)* '}' | index | token
//
// An index is a decimal feature number; a token is resolved to the position
// of its first occurrence in the vocabulary. '|' is sugar: the parser rewrites
// a | b to !(!a & !b), so canonical queries only contain atoms, '!' and '&'.
//
// Negation of a compound query is the complement of its filter vector. On an
// atom this is exactly the absence rule: !S is true on L iff S and L are
// disjoint.

#ifndef SYMQ_QUERY_HPP_
#define SYMQ_QUERY_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symq/lattice.hpp"

namespace symq {

// Immutable query AST. Copies share structure.
class Query {
 public:
  enum class Kind { kAtom, kNot, kAnd, kOr };

  // Throws InvalidArgument for an empty feature set.
  static Query Atom(std::uint64_t features);
  static Query Atom(std::initializer_list<int> features);
  static Query Atom(const SubsetMask& features) {
    return Atom(features.bits());
  }
  static Query Not(Query child);
  static Query And(Query left, Query right);
  static Query Or(Query left, Query right);

  Kind kind() const noexcept { return node_->kind; }
  // Feature set of an atom.
  std::uint64_t atom_features() const noexcept { return node_->features; }
  // Operand of Not, left operand of And/Or.
  const Query& left() const noexcept { return *node_->left; }
  const Query& right() const noexcept { return *node_->right; }
  const Query& child() const noexcept { return *node_->left; }

  // Union of all atom feature sets.
  std::uint64_t referenced_features() const noexcept {
    return node_->referenced;
  }

  friend bool operator==(const Query& a, const Query& b);

 private:
  struct Node {
    Kind kind;
    std::uint64_t features = 0;
    std::uint64_t referenced = 0;
    std::shared_ptr<const Query> left;
    std::shared_ptr<const Query> right;
  };

  explicit Query(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Rewrites '|' by De Morgan, removes double negations, flattens conjunctions,
// drops repeated conjuncts and orders conjuncts by smallest referenced
// feature (ties by rendered text). The filter vector is unchanged.
Query Canonicalize(const Query& q);

// Parses and canonicalizes. SyntaxError positions are 1-based columns.
// Throws UnknownToken for names missing from the vocabulary and
// IndexOutOfRange for indices >= n (when n > 0) or >= 64.
Query ParseQuery(std::string_view text,
                 std::span<const std::string> vocabulary = {}, int n = 0);

// Deterministic text form of Canonicalize(q), e.g. "!{0} & {2}". With a
// vocabulary, single-feature atoms whose token is unambiguous are rendered as
// that token. ParseQuery(CanonicalString(q, v), v) has q's filter vector.
std::string CanonicalString(const Query& q,
                            std::span<const std::string> vocabulary = {});

// Boolean vector over a lattice support, packed 64 subsets per word.
class FilterVector {
 public:
  FilterVector() = default;
  // All-false vector on `support`.
  explicit FilterVector(LatticeSupport support);

  const LatticeSupport& support() const noexcept { return support_; }
  std::size_t size() const noexcept { return support_.size(); }
  bool operator[](std::size_t position) const noexcept {
    return ((words_[position >> 6] >> (position & 63)) & 1U) != 0;
  }
  void set(std::size_t position, bool value) noexcept;
  std::size_t count() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  FilterVector operator~() const;
  FilterVector operator&(const FilterVector& other) const;
  FilterVector operator|(const FilterVector& other) const;
  FilterVector& operator&=(const FilterVector& other);

  friend bool operator==(const FilterVector& a, const FilterVector& b) {
    return a.support_ == b.support_ && a.words_ == b.words_;
  }

 private:
  void ClearTail() noexcept;

  LatticeSupport support_;
  std::vector<std::uint64_t> words_;
};

// Presence atom: true on L iff S and L intersect.
FilterVector PresenceFilter(std::uint64_t features,
                            const LatticeSupport& support);

// lambda_L(q) for every member L of the support. Throws IndexOutOfRange when
// q references a feature >= support.n().
FilterVector EvaluateFilter(const Query& q, const LatticeSupport& support);

}  // namespace symq

#endif  // SYMQ_QUERY_HPP_
