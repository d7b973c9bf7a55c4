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
#include <string>
#include <utility>
#include <vector>

#include "dcool/hjb.hpp"

namespace dcool {

// Numerical certification that the identity maximizes F for every context
// generated by the closed-form co-state, plus the intermediate proof steps.
struct CertifyConfig {
  std::vector<std::pair<double, double>> systems{{2.0, 1.0}, {1.0, 1.0}, {4.0, 1.0}};
  int lambda_resolution = 10;                 // ordered-simplex lattice spacing 1/r
  std::vector<double> tau_fractions{0.25, 0.5, 1.0, 1.5, 3.0};  // multiples of tau*
  std::vector<double> tau_absolute{0.05, 1.0};
  ArgmaxConfig argmax;
  int exchange_samples = 1000;
  double argmax_tol = 1e-9;
  double hessian_identity_tol = 1e-12;
  double hessian_fd_tol = 1e-6;
  double slope_tol = 1e-12;      // slopes must satisfy <= slope_tol
  double slope_fd_tol = 1e-8;
  double gradient_tol = 1e-5;
  double exchange_tol = 1e-12;
  bool swap_mu = false;          // negative control: reverse mu before the argmax check
  std::uint64_t seed = 20240611;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // worst observed value of the checked quantity
  double threshold = 0.0;
  std::size_t count = 0;
};

struct CertifyContext {
  double gamma1;
  double gamma2;
  Vec lambda;
  double tau;
  double tau_star;
};

struct CertifyReport {
  std::vector<CheckResult> checks;
  std::size_t contexts = 0;
  std::size_t pre_equalization_contexts = 0;
  std::size_t equalized_contexts = 0;
  bool all_passed() const;
  const CheckResult& check(const std::string& name) const;
};

/// Lattice of (system, lambda, tau) points spanning both regimes.
std::vector<CertifyContext> certification_lattice(const CertifyConfig& cfg);

CertifyReport run_certification(const CertifyConfig& cfg);

}  // namespace dcool
