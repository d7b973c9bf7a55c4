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

#include "dcool/lambda3.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dcool {

namespace {

void require_three(const Spectrum& lambda) {
  if (lambda.size() != 3) throw Error(ErrorCode::DimensionMismatch, "Lambda system needs N = 3");
}

// Closed forms on raw coordinates; the finite-difference check evaluates them
// slightly off the validated spectra.
double tau_star_raw(double l2, double l3, double g1, double g2) {
  if (!(l2 > 0.0)) {
    throw Error(ErrorCode::DegenerateInput, "tau* undefined for lambda2 = 0", l2);
  }
  const double ratio = (l2 * g2 + l3 * (g1 + g2)) / (l2 * (g1 + 2.0 * g2));
  return std::max(0.0, -std::log(ratio) / (g1 + g2));
}

double lambda2_star_raw(double l2, double l3, double g1, double g2) {
  return (g2 * l2 + (g1 + g2) * l3) / (g1 + 2.0 * g2);
}

double return_raw(double l1, double l2, double l3, double tau, double g1, double g2) {
  const double s = g1 + g2;
  const double pre = l1 + (g1 / s) * l2 * (1.0 - std::exp(-s * tau));
  if (!(l2 > 0.0)) return pre;  // lambda = [1,0,0]: nothing left to cool
  const double ts = tau_star_raw(l2, l3, g1, g2);
  if (tau <= ts) return pre;
  return 1.0 - 2.0 * lambda2_star_raw(l2, l3, g1, g2) * std::exp(-0.5 * g1 * (tau - ts));
}

}  // namespace

LambdaSystem::LambdaSystem(double gamma1, double gamma2) : g1_(gamma1), g2_(gamma2) {
  if (!(gamma2 > 0.0) || !(gamma1 >= gamma2) || !std::isfinite(gamma1)) {
    throw Error(ErrorCode::InvalidRates, "Lambda system needs gamma1 >= gamma2 > 0");
  }
}

std::string_view to_string(Regime r) {
  return r == Regime::PreEqualization ? "PreEqualization" : "Equalized";
}

double tau_star(const Spectrum& lambda, const LambdaSystem& sys) {
  require_three(lambda);
  return tau_star_raw(lambda[1], lambda[2], sys.gamma1(), sys.gamma2());
}

double lambda2_at_tau_star(const Spectrum& lambda, const LambdaSystem& sys) {
  require_three(lambda);
  if (!(lambda[1] > 0.0)) {
    throw Error(ErrorCode::DegenerateInput, "tau* undefined for lambda2 = 0", lambda[1]);
  }
  return lambda2_star_raw(lambda[1], lambda[2], sys.gamma1(), sys.gamma2());
}

RegimeReport regime(const Spectrum& lambda, double tau, const LambdaSystem& sys) {
  const double ts = tau_star(lambda, sys);
  return {tau, ts, tau <= ts ? Regime::PreEqualization : Regime::Equalized};
}

double return_function(const Spectrum& lambda, double tau, const LambdaSystem& sys) {
  require_three(lambda);
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0", tau);
  return return_raw(lambda[0], lambda[1], lambda[2], tau, sys.gamma1(), sys.gamma2());
}

std::array<double, 3> mu(const Spectrum& lambda, double tau, const LambdaSystem& sys) {
  require_three(lambda);
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0", tau);
  const double g1 = sys.gamma1();
  const double g2 = sys.gamma2();
  const double s = g1 + g2;
  if (tau == 0.0) return {1.0, 0.0, 0.0};
  const double l2 = lambda[1];
  const double l3 = lambda[2];
  const double ts = tau_star_raw(l2, l3, g1, g2);
  if (tau <= ts) return {1.0, (g1 / s) * (1.0 - std::exp(-s * tau)), 0.0};
  const double decay = std::exp(-0.5 * g1 * (tau - ts));
  return {0.0, -((2.0 * g2 * l2 + g1 * l3) / (l2 * (g1 + 2.0 * g2))) * decay, -decay};
}

SpectralPolicy greedy_policy() {
  const DoublyStochastic id = DoublyStochastic::identity(3);
  return {[id](const Vec&, double) { return id; }, true, "greedy"};
}

GradientCheckReport mu_gradient_check(const Spectrum& lambda, double tau, const LambdaSystem& sys,
                                      double step, double tol) {
  require_three(lambda);
  GradientCheckReport rep{};
  rep.mu = mu(lambda, tau, sys);
  const double g1 = sys.gamma1();
  const double g2 = sys.gamma2();
  // V depends on the spectrum only, so probes that cross a degeneracy are re-sorted.
  auto value = [&](std::array<double, 3> l) {
    std::sort(l.begin(), l.end(), std::greater<>());
    return return_raw(l[0], l[1], l[2], tau, g1, g2);
  };
  const std::array<double, 3> base{lambda[0], lambda[1], lambda[2]};
  // d_i = dV/dl_i - dV/dl_3 along e_i - e_3 stays on the simplex.
  std::array<double, 3> diff{0.0, 0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    auto plus = base;
    auto minus = base;
    plus[static_cast<std::size_t>(i)] += step;
    plus[2] -= step;
    minus[static_cast<std::size_t>(i)] -= step;
    minus[2] += step;
    diff[static_cast<std::size_t>(i)] = (value(plus) - value(minus)) / (2.0 * step);
  }
  rep.max_deviation = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    rep.finite_difference[i] = diff[i] + rep.mu[2];
    rep.max_deviation =
        std::max(rep.max_deviation, std::abs(rep.finite_difference[i] - rep.mu[i]));
  }
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

}  // namespace dcool
