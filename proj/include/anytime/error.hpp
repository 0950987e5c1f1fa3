// Copyright 2026 The Anytime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anytime {

enum class ErrorCode {
  kInvalidConfig,
  kOutOfBounds,
  kInvalidStake,
  kStreamDesync,
  kInvalidMixture,
  kUndefinedEffectiveStake,
  kNoPositiveGrowth,
  kInfiniteExpectedSample,
  kNeverRejects,
  kStateSpaceTooLarge,
  kParse,
  kConflict,
  kNotFound,
  kInvalidPolicy,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Error(ErrorCode code, const std::string& what, std::size_t index)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  // Position of the offending observation or input line, when known.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace anytime
