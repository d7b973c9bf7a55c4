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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcool/types.hpp"

namespace dcool::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kInvariantViolation = 2,
  kToleranceFailure = 3,
};

struct RunConfig {
  // system
  double gamma1 = 2.0;
  double gamma2 = 1.0;
  std::optional<RMatrix> rates;  // general rate matrix; replaces (gamma1, gamma2)
  std::vector<double> lambda0{0.5, 0.3, 0.2};
  double horizon = 3.0;
  std::optional<double> dt;      // unset: 1e-3 / max rate
  std::uint64_t seed = 20240611;
  std::string out = "out";

  // simulate
  std::string policy = "greedy";  // greedy | identity | schedule
  std::string schedule;           // JSON file with piecewise-constant theta segments
  std::string model = "spectral"; // spectral | lindblad
  int stride = 10;

  // dp
  int grid_m = 60;
  int n_t = 2000;
  double dp_bound = 5e-3;
  int dp_haar = 64;
  int dp_triangle = 11;
  int table_slices = 11;

  // certify
  int n_haar = 64;
  int n_birkhoff = 64;
  int exchange_samples = 1000;
  int lambda_resolution = 10;
  bool swap_mu = false;

  // equiv
  int samples = 500;
  int dim = 3;
  std::string rate_preset = "random";
  int perturbation_samples = 100;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a JSON config document; unknown keys and type mismatches raise
/// ConfigError naming the field.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);
/// Range checks shared by all commands.
void validate(const RunConfig& cfg);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::string tool_version();

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double v);

int cmd_simulate(const RunConfig& cfg);
int cmd_certify(const RunConfig& cfg);
int cmd_dp(const RunConfig& cfg);
int cmd_equiv(const RunConfig& cfg);

/// Entry point used by the dcool executable.
int run(int argc, char** argv);

}  // namespace dcool::cli
