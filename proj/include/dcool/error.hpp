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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcool {

enum class ErrorCode {
  NotHermitian,
  TraceDeviation,
  NegativeEigenvalue,
  EigensolverFailure,
  DimensionMismatch,
  NotUnitary,
  NotDoublyStochastic,
  InvalidRates,
  InvalidArgument,
  InvariantViolation,
  DegenerateInput,
  DomainViolation,
  GridUnderflow,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library is reported through this type. `magnitude`
// carries the measured deviation (or offending time for trajectory
// violations) so callers can report how badly an invariant was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, double magnitude = 0.0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        magnitude_(magnitude) {}

  ErrorCode code() const noexcept { return code_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  ErrorCode code_;
  double magnitude_;
};

}  // namespace dcool
