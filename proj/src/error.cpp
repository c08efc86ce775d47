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

#include "fedban/error.hpp"

namespace fedban {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kArmNotInSet: return "ArmNotInSet";
    case ErrorCode::kEmptyArmSet: return "EmptyArmSet";
    case ErrorCode::kUnknownClientId: return "UnknownClientId";
    case ErrorCode::kAlreadySelected: return "AlreadySelected";
    case ErrorCode::kNotSelected: return "NotSelected";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kTooManyClients: return "TooManyClients";
    case ErrorCode::kNonMonotoneDetected: return "NonMonotoneDetected";
    case ErrorCode::kComplexityBoundExceeded: return "ComplexityBoundExceeded";
    case ErrorCode::kNonPositiveReport: return "NonPositiveReport";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(ErrorCodeName(code)) + ": " + what);
}

}  // namespace fedban
