// Copyright 2026 The Authors.
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

#ifndef FEDBAN_ERROR_HPP_
#define FEDBAN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fedban {

// Every failure raised by the core library carries one of these codes; the
// C API maps them one-to-one onto fedban_status values.
enum class ErrorCode {
  kDimensionMismatch,
  kNotPositiveDefinite,
  kArmNotInSet,
  kEmptyArmSet,
  kUnknownClientId,
  kAlreadySelected,
  kNotSelected,
  kInfeasible,
  kTooManyClients,
  kNonMonotoneDetected,
  kComplexityBoundExceeded,
  kNonPositiveReport,
  kConfigInvalid,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& what);

}  // namespace fedban

#endif  // FEDBAN_ERROR_HPP_
