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

#include "symq/error.hpp"

namespace symq {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kFullLatticeTooLarge:
      return "FullLatticeTooLarge";
    case ErrorCode::kInvalidOrder:
      return "InvalidOrder";
    case ErrorCode::kShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::kMissingTableEntry:
      return "MissingTableEntry";
    case ErrorCode::kOracleProtocolError:
      return "OracleProtocolError";
    case ErrorCode::kOracleTimeout:
      return "OracleTimeout";
    case ErrorCode::kWalkIndexOutOfRange:
      return "WalkIndexOutOfRange";
    case ErrorCode::kWalkOrderExceedsSupport:
      return "WalkOrderExceedsSupport";
    case ErrorCode::kSyntaxError:
      return "SyntaxError";
    case ErrorCode::kUnknownToken:
      return "UnknownToken";
    case ErrorCode::kIndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorCode::kUncoveredSubset:
      return "UncoveredSubset";
    case ErrorCode::kEmptyQuerySpace:
      return "EmptyQuerySpace";
    case ErrorCode::kSpaceTooLarge:
      return "SpaceTooLarge";
    case ErrorCode::kAllWeightsZero:
      return "AllWeightsZero";
    case ErrorCode::kNotAPermutation:
      return "NotAPermutation";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

SyntaxError::SyntaxError(std::size_t position, const std::string& message)
    : Error(ErrorCode::kSyntaxError,
            "at position " + std::to_string(position) + ": " + message),
      position_(position) {}

}  // namespace symq
