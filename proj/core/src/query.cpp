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

#include "symq/query.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <utility>

#include "symq/error.hpp"

namespace symq {
namespace {

constexpr std::string_view kOperatorChars = "!&|(){},";

bool IsTokenChar(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) &&
         kOperatorChars.find(c) == std::string_view::npos;
}

bool IsAllDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

// Tokens usable as bare names: non-empty, operator-free, not a number.
bool IsRenderableToken(std::string_view token) {
  return !token.empty() && !IsAllDigits(token) &&
         std::all_of(token.begin(), token.end(), IsTokenChar);
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vocabulary,
         int n)
      : text_(text), vocabulary_(vocabulary), n_(n) {}

  Query Parse() {
    SkipSpaces();
    if (AtEnd()) throw SyntaxError(Column(), "empty query");
    Query q = ParseDisjunction();
    SkipSpaces();
    if (!AtEnd()) {
      throw SyntaxError(Column(), "unexpected '" + std::string(1, Peek()) +
                                      "' after complete query");
    }
    return q;
  }

 private:
  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }
  std::size_t Column() const { return pos_ + 1; }

  void SkipSpaces() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(Peek()))) ++pos_;
  }

  bool Accept(char c) {
    SkipSpaces();
    if (!AtEnd() && Peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Query ParseDisjunction() {
    Query q = ParseConjunction();
    while (Accept('|')) q = Query::Or(q, ParseConjunction());
    return q;
  }

  Query ParseConjunction() {
    Query q = ParseUnary();
    while (Accept('&')) q = Query::And(q, ParseUnary());
    return q;
  }

  Query ParseUnary() {
    if (Accept('!')) return Query::Not(ParseUnary());
    return ParsePrimary();
  }

  Query ParsePrimary() {
    SkipSpaces();
    if (AtEnd()) throw SyntaxError(Column(), "unexpected end of query");
    const char c = Peek();
    if (c == '(') {
      ++pos_;
      Query q = ParseDisjunction();
      if (!Accept(')')) throw SyntaxError(Column(), "expected ')'");
      return q;
    }
    if (c == '{') {
      ++pos_;
      std::uint64_t bits = 0;
      do {
        SkipSpaces();
        bits |= std::uint64_t{1} << ParseIndex();
      } while (Accept(','));
      if (!Accept('}')) throw SyntaxError(Column(), "expected '}' or ','");
      return Query::Atom(bits);
    }
    if (IsTokenChar(c)) {
      const std::size_t start = pos_;
      while (!AtEnd() && IsTokenChar(Peek())) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (IsAllDigits(word)) {
        pos_ = start;
        return Query::Atom(std::uint64_t{1} << ParseIndex());
      }
      for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
        if (vocabulary_[i] == word) {
          return Query::Atom(std::uint64_t{1} << CheckIndex(i, start));
        }
      }
      throw Error(ErrorCode::kUnknownToken,
                  "token \"" + std::string(word) + "\" at position " +
                      std::to_string(start + 1) + " is not in the vocabulary");
    }
    throw SyntaxError(Column(), "unexpected '" + std::string(1, c) + "'");
  }

  int ParseIndex() {
    const std::size_t start = pos_;
    std::size_t value = 0;
    const auto [end, ec] =
        std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec == std::errc::result_out_of_range) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "feature index at position " + std::to_string(start + 1) +
                      " is too large");
    }
    if (ec != std::errc()) throw SyntaxError(Column(), "expected feature index");
    pos_ = static_cast<std::size_t>(end - text_.data());
    if (!AtEnd() && IsTokenChar(Peek())) {
      throw SyntaxError(Column(), "unexpected character in feature index");
    }
    return CheckIndex(value, start);
  }

  int CheckIndex(std::size_t value, std::size_t start) const {
    const std::size_t limit =
        n_ > 0 ? static_cast<std::size_t>(n_) : std::size_t{kMaxFeatures};
    if (value >= limit) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "feature " + std::to_string(value) + " at position " +
                      std::to_string(start + 1) + " outside [0, " +
                      std::to_string(limit) + ")");
    }
    return static_cast<int>(value);
  }

  std::string_view text_;
  std::span<const std::string> vocabulary_;
  int n_;
  std::size_t pos_ = 0;
};

std::string RenderAtom(std::uint64_t features,
                       std::span<const std::string> vocabulary) {
  if (std::popcount(features) == 1) {
    const auto index = static_cast<std::size_t>(std::countr_zero(features));
    if (index < vocabulary.size() && IsRenderableToken(vocabulary[index]) &&
        std::count(vocabulary.begin(), vocabulary.end(), vocabulary[index]) ==
            1) {
      return vocabulary[index];
    }
  }
  return "{" + SubsetKey(features) + "}";
}

// Renders an already canonical query.
std::string Render(const Query& q, std::span<const std::string> vocabulary) {
  switch (q.kind()) {
    case Query::Kind::kAtom:
      return RenderAtom(q.atom_features(), vocabulary);
    case Query::Kind::kNot:
      if (q.child().kind() == Query::Kind::kAnd) {
        return "!(" + Render(q.child(), vocabulary) + ")";
      }
      return "!" + Render(q.child(), vocabulary);
    case Query::Kind::kAnd:
      return Render(q.left(), vocabulary) + " & " +
             Render(q.right(), vocabulary);
    case Query::Kind::kOr:
      break;
  }
  // Canonical queries contain no Or; render defensively anyway.
  return "(" + Render(q.left(), vocabulary) + ") | (" +
         Render(q.right(), vocabulary) + ")";
}

void CollectConjuncts(const Query& q, std::vector<Query>& out) {
  if (q.kind() == Query::Kind::kAnd) {
    CollectConjuncts(q.left(), out);
    CollectConjuncts(q.right(), out);
  } else {
    out.push_back(q);
  }
}

Query Negate(const Query& q) {
  return q.kind() == Query::Kind::kNot ? q.child() : Query::Not(q);
}

Query CanonicalizeImpl(const Query& q) {
  switch (q.kind()) {
    case Query::Kind::kAtom:
      return q;
    case Query::Kind::kNot:
      return Negate(CanonicalizeImpl(q.child()));
    case Query::Kind::kOr:
      return Negate(CanonicalizeImpl(Query::And(Negate(q.left()),
                                                Negate(q.right()))));
    case Query::Kind::kAnd:
      break;
  }

  std::vector<Query> flat;
  CollectConjuncts(q, flat);
  std::vector<Query> parts;
  for (const Query& c : flat) CollectConjuncts(CanonicalizeImpl(c), parts);

  std::vector<std::pair<std::string, Query>> keyed;
  keyed.reserve(parts.size());
  for (const Query& p : parts) keyed.emplace_back(Render(p, {}), p);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    const int ma = std::countr_zero(a.second.referenced_features());
    const int mb = std::countr_zero(b.second.referenced_features());
    if (ma != mb) return ma < mb;
    return a.first < b.first;
  });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) {
                            return a.first == b.first;
                          }),
              keyed.end());

  Query result = keyed.front().second;
  for (std::size_t i = 1; i < keyed.size(); ++i) {
    result = Query::And(result, keyed[i].second);
  }
  return result;
}

}  // namespace

Query Query::Atom(std::uint64_t features) {
  if (features == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "query atoms must reference at least one feature");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::kAtom;
  node->features = features;
  node->referenced = features;
  return Query(std::move(node));
}

Query Query::Atom(std::initializer_list<int> features) {
  std::uint64_t bits = 0;
  for (int f : features) {
    if (f < 0 || f >= kMaxFeatures) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "feature " + std::to_string(f) + " outside [0, 64)");
    }
    bits |= std::uint64_t{1} << f;
  }
  return Atom(bits);
}

Query Query::Not(Query child) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kNot;
  node->referenced = child.referenced_features();
  node->left = std::make_shared<const Query>(std::move(child));
  return Query(std::move(node));
}

Query Query::And(Query left, Query right) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::kAnd;
  node->referenced = left.referenced_features() | right.referenced_features();
  node->left = std::make_shared<const Query>(std::move(left));
  node->right = std::make_shared<const Query>(std::move(right));
  return Query(std::move(node));
}

Query Query::Or(Query left, Query right) {
  Query q = And(std::move(left), std::move(right));
  auto node = std::make_shared<Node>(*q.node_);
  node->kind = Kind::kOr;
  return Query(std::move(node));
}

bool operator==(const Query& a, const Query& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Query::Kind::kAtom:
      return a.atom_features() == b.atom_features();
    case Query::Kind::kNot:
      return a.child() == b.child();
    case Query::Kind::kAnd:
    case Query::Kind::kOr:
      return a.left() == b.left() && a.right() == b.right();
  }
  return false;
}

Query Canonicalize(const Query& q) { return CanonicalizeImpl(q); }

Query ParseQuery(std::string_view text, std::span<const std::string> vocabulary,
                 int n) {
  return Canonicalize(Parser(text, vocabulary, n).Parse());
}

std::string CanonicalString(const Query& q,
                            std::span<const std::string> vocabulary) {
  return Render(Canonicalize(q), vocabulary);
}

FilterVector::FilterVector(LatticeSupport support)
    : support_(std::move(support)), words_((support_.size() + 63) / 64, 0) {}

void FilterVector::set(std::size_t position, bool value) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (position & 63);
  if (value) {
    words_[position >> 6] |= bit;
  } else {
    words_[position >> 6] &= ~bit;
  }
}

std::size_t FilterVector::count() const noexcept {
  std::size_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

void FilterVector::ClearTail() noexcept {
  const std::size_t rem = support_.size() & 63;
  if (rem != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << rem) - 1;
  }
}

FilterVector FilterVector::operator~() const {
  FilterVector out = *this;
  for (std::uint64_t& w : out.words_) w = ~w;
  out.ClearTail();
  return out;
}

FilterVector FilterVector::operator&(const FilterVector& other) const {
  FilterVector out = *this;
  out &= other;
  return out;
}

FilterVector& FilterVector::operator&=(const FilterVector& other) {
  if (!(support_ == other.support_)) {
    throw Error(ErrorCode::kShapeMismatch,
                "filter vectors live on different supports");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

FilterVector FilterVector::operator|(const FilterVector& other) const {
  if (!(support_ == other.support_)) {
    throw Error(ErrorCode::kShapeMismatch,
                "filter vectors live on different supports");
  }
  FilterVector out = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out.words_[i] |= other.words_[i];
  }
  return out;
}

FilterVector PresenceFilter(std::uint64_t features,
                            const LatticeSupport& support) {
  FilterVector out(support);
  const auto masks = support.masks();
  for (std::size_t p = 0; p < masks.size(); ++p) {
    if ((masks[p] & features) != 0) out.set(p, true);
  }
  return out;
}

FilterVector EvaluateFilter(const Query& q, const LatticeSupport& support) {
  const std::uint64_t limit =
      support.n() >= 64 ? ~std::uint64_t{0}
                        : (std::uint64_t{1} << support.n()) - 1;
  if ((q.referenced_features() & ~limit) != 0) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "query references feature " +
                    std::to_string(63 - std::countl_zero(
                                            q.referenced_features())) +
                    " but the support has " + std::to_string(support.n()) +
                    " features");
  }
  switch (q.kind()) {
    case Query::Kind::kAtom:
      return PresenceFilter(q.atom_features(), support);
    case Query::Kind::kNot:
      return ~EvaluateFilter(q.child(), support);
    case Query::Kind::kAnd:
      return EvaluateFilter(q.left(), support) &
             EvaluateFilter(q.right(), support);
    case Query::Kind::kOr:
      return EvaluateFilter(q.left(), support) |
             EvaluateFilter(q.right(), support);
  }
  return FilterVector(support);
}

}  // namespace symq
