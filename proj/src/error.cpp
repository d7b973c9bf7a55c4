// Copyright 2026 The dcool Authors
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

#include "dcool/error.hpp"

namespace dcool {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::TraceDeviation: return "TraceDeviation";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorCode::InvalidRates: return "InvalidRates";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::GridUnderflow: return "GridUnderflow";
  }
  return "Unknown";
}

}  // namespace dcool
