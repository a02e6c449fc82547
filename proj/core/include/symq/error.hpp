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

#ifndef SYMQ_ERROR_HPP_
#define SYMQ_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symq {

enum class ErrorCode {
  kInvalidArgument,
  kFullLatticeTooLarge,
  kInvalidOrder,
  kShapeMismatch,
  kMissingTableEntry,
  kOracleProtocolError,
  kOracleTimeout,
  kWalkIndexOutOfRange,
  kWalkOrderExceedsSupport,
  kSyntaxError,
  kUnknownToken,
  kIndexOutOfRange,
  kUncoveredSubset,
  kEmptyQuerySpace,
  kSpaceTooLarge,
  kAllWeightsZero,
  kNotAPermutation,
  kIoError,
};

// Stable name of an error code, e.g. "ShapeMismatch".
std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code is
// machine-checkable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the query parser. `position` is the 1-based column of the first
// offending character.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace symq

#endif  // SYMQ_ERROR_HPP_
