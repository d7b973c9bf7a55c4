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

#include "dcool/spectral.hpp"

namespace dcool {

enum class RatePreset { Lambda, Random, TwoExcited, Zero };
RatePreset parse_rate_preset(const std::string& name);
std::string to_string(RatePreset p);

/// Rate matrix for a preset; `Lambda` uses (gamma1, gamma2) and needs n = 3,
/// `TwoExcited` needs n = 4 (levels 2 and 3 decay into levels 1 and 4).
RateMatrix preset_rates(RatePreset preset, Index n, std::mt19937_64& rng, double gamma1 = 2.0,
                        double gamma2 = 1.0);

/// Random point of the simplex (flat Dirichlet), sorted descending, with all
/// adjacent gaps and the smallest entry at least `min_gap`.
Vec random_spectrum(Index n, std::mt19937_64& rng, double min_gap = 0.0);

struct EquivalenceConfig {
  Index dim = 3;
  int samples = 500;
  RatePreset rates = RatePreset::Random;
  double gamma1 = 2.0;
  double gamma2 = 1.0;
  std::uint64_t seed = 20240611;
  int perturbation_samples = 100;
  double perturbation_gap = 0.05;
  double dt = 1e-3;
  double algebraic_tol = 1e-9;
  double ratio_lo = 3.5;
  double ratio_hi = 4.5;
};

struct EquivalenceReport {
  int samples = 0;
  double max_algebraic_deviation = 0.0;
  int perturbation_samples = 0;
  int exact_perturbation_samples = 0;  // samples without dissipation, nothing to compare
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool algebraic_pass = true;
  bool perturbation_pass = true;
};

/// First-order error || spectrum(rho + L(rho) dt) - (lambda + M lambda dt) ||_inf.
double first_order_error(const Vec& lambda, const CMatrix& u, const RateMatrix& rates, double dt);

EquivalenceReport run_equivalence(const EquivalenceConfig& cfg);

}  // namespace dcool
