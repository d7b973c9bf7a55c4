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

#include <array>
#include <string_view>

#include "dcool/spectral.hpp"

namespace dcool {

// Lambda system with excited level 2 decaying to 1 (gamma1) and to 3 (gamma2);
// labels are chosen so that gamma1 >= gamma2.
class LambdaSystem {
 public:
  LambdaSystem(double gamma1, double gamma2);

  double gamma1() const noexcept { return g1_; }
  double gamma2() const noexcept { return g2_; }
  double total() const noexcept { return g1_ + g2_; }

  RateMatrix rates() const { return RateMatrix::lambda_system(g1_, g2_); }
  SpectralGenerator generator() const { return build_generator(rates()); }

 private:
  double g1_;
  double g2_;
};

enum class Regime { PreEqualization, Equalized };
std::string_view to_string(Regime r);

struct RegimeReport {
  double tau;
  double tau_star;
  Regime regime;
};

/// Remaining time after which lambda2 and lambda3 meet under the greedy policy.
double tau_star(const Spectrum& lambda, const LambdaSystem& sys);
/// Common value of lambda2 and lambda3 at the meeting point.
double lambda2_at_tau_star(const Spectrum& lambda, const LambdaSystem& sys);
/// PreEqualization iff tau <= tau_star.
RegimeReport regime(const Spectrum& lambda, double tau, const LambdaSystem& sys);

/// Largest achievable final eigenvalue with `tau` time remaining.
double return_function(const Spectrum& lambda, double tau, const LambdaSystem& sys);

/// Co-state dV/dlambda in the gauge the closed forms are written in
/// (mu3 = 0 before equalization, mu1 = 0 after).
std::array<double, 3> mu(const Spectrum& lambda, double tau, const LambdaSystem& sys);

/// Theta = I with relabelling after every step, i.e. keep rho diagonal and
/// its populations ordered.
SpectralPolicy greedy_policy();

struct GradientCheckReport {
  std::array<double, 3> mu;
  std::array<double, 3> finite_difference;  // shifted so its last entry equals mu[2]
  double max_deviation;
  bool pass;
};

/// Central differences of return_function along the simplex edge directions
/// e_i - e_j, compared with mu_i - mu_j.
GradientCheckReport mu_gradient_check(const Spectrum& lambda, double tau, const LambdaSystem& sys,
                                      double step = 1e-5, double tol = 1e-5);

}  // namespace dcool
