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

#include "dcool/equivalence.hpp"

#include <algorithm>
#include <cmath>

namespace dcool {

RatePreset parse_rate_preset(const std::string& name) {
  if (name == "lambda") return RatePreset::Lambda;
  if (name == "random") return RatePreset::Random;
  if (name == "two_excited") return RatePreset::TwoExcited;
  if (name == "zero") return RatePreset::Zero;
  throw Error(ErrorCode::InvalidArgument, "unknown rate preset '" + name + "'");
}

std::string to_string(RatePreset p) {
  switch (p) {
    case RatePreset::Lambda: return "lambda";
    case RatePreset::Random: return "random";
    case RatePreset::TwoExcited: return "two_excited";
    case RatePreset::Zero: return "zero";
  }
  return "unknown";
}

RateMatrix preset_rates(RatePreset preset, Index n, std::mt19937_64& rng, double gamma1,
                        double gamma2) {
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  RMatrix g = RMatrix::Zero(n, n);
  switch (preset) {
    case RatePreset::Lambda:
      if (n != 3) throw Error(ErrorCode::DimensionMismatch, "lambda preset needs N = 3");
      return RateMatrix::lambda_system(gamma1, gamma2);
    case RatePreset::Random:
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (i != j) g(i, j) = rate(rng);
      break;
    case RatePreset::TwoExcited:
      if (n != 4) throw Error(ErrorCode::DimensionMismatch, "two_excited preset needs N = 4");
      for (Index excited : {Index{1}, Index{2}})
        for (Index ground : {Index{0}, Index{3}}) g(ground, excited) = rate(rng);
      break;
    case RatePreset::Zero:
      break;
  }
  return RateMatrix(g);
}

Vec random_spectrum(Index n, std::mt19937_64& rng, double min_gap) {
  std::exponential_distribution<double> expo(1.0);
  for (;;) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = expo(rng);
    v /= v.sum();
    v = sorted_descending(v);
    bool ok = v[n - 1] >= min_gap;
    for (Index i = 0; i + 1 < n; ++i) ok = ok && (v[i] - v[i + 1] >= min_gap);
    if (ok) return v;
  }
}

double first_order_error(const Vec& lambda, const CMatrix& u, const RateMatrix& rates, double dt) {
  const CMatrix rho = u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
  const CMatrix stepped = rho + dt * dissipator(rho, rates);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (stepped + stepped.adjoint()), Eigen::EigenvaluesOnly);
  const Vec exact = sorted_descending(es.eigenvalues());
  const SpectralGenerator gen = build_generator(rates);
  const Vec first = sorted_descending(lambda + dt * spectral_rhs(lambda, theta_from_unitary(u), gen));
  return (exact - first).cwiseAbs().maxCoeff();
}

EquivalenceReport run_equivalence(const EquivalenceConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  EquivalenceReport rep;
  for (int k = 0; k < cfg.samples; ++k) {
    const RateMatrix rates = preset_rates(cfg.rates, cfg.dim, rng, cfg.gamma1, cfg.gamma2);
    const CMatrix u = haar_unitary(cfg.dim, rng);
    const Vec lambda = random_spectrum(cfg.dim, rng);
    const Vec fast = spectral_rhs(lambda, theta_from_unitary(u), build_generator(rates));
    const Vec slow = spectral_rhs_oracle(lambda, u, rates);
    rep.max_algebraic_deviation = std::max(rep.max_algebraic_deviation, (fast - slow).cwiseAbs().maxCoeff());
    ++rep.samples;
  }
  rep.algebraic_pass = rep.max_algebraic_deviation <= cfg.algebraic_tol;

  rep.min_ratio = INFINITY;
  rep.max_ratio = -INFINITY;
  for (int k = 0; k < cfg.perturbation_samples; ++k) {
    const RateMatrix rates = preset_rates(cfg.rates, cfg.dim, rng, cfg.gamma1, cfg.gamma2);
    const CMatrix u = haar_unitary(cfg.dim, rng);
    const Vec lambda = random_spectrum(cfg.dim, rng, cfg.perturbation_gap);
    ++rep.perturbation_samples;
    // Without dissipation rho does not move; the only "error" left would be
    // eigensolver rounding, which has no order to measure.
    if (rates.max_rate() == 0.0) {
      ++rep.exact_perturbation_samples;
      continue;
    }
    const double e1 = first_order_error(lambda, u, rates, cfg.dt);
    const double e2 = first_order_error(lambda, u, rates, 0.5 * cfg.dt);
    const double ratio = e2 > 0.0 ? e1 / e2 : INFINITY;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (!(ratio >= cfg.ratio_lo && ratio <= cfg.ratio_hi)) rep.perturbation_pass = false;
  }
  if (rep.exact_perturbation_samples == rep.perturbation_samples) {
    rep.min_ratio = rep.max_ratio = 0.0;
  }
  return rep;
}

}  // namespace dcool
