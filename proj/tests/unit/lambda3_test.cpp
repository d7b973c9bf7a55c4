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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dcool/error.hpp"
#include "dcool/hjb.hpp"
#include "dcool/lambda3.hpp"
#include "oracles.hpp"

namespace dcool {
namespace {

Spectrum s3(double a, double b, double c) { return Spectrum::from_sorted((Vec(3) << a, b, c).finished()); }

const LambdaSystem kSys(2.0, 1.0);

TEST(LambdaSystemTest, RequiresOrderedPositiveRates) {
  EXPECT_THROW(LambdaSystem(1.0, 2.0), Error);
  EXPECT_THROW(LambdaSystem(1.0, 0.0), Error);
  EXPECT_NO_THROW(LambdaSystem(1.0, 1.0));
}

TEST(TauStarTest, MatchesCrossingOfRateEquations) {
  EXPECT_NEAR(tau_star(s3(0.5, 0.3, 0.2), kSys), std::log(4.0 / 3.0) / 3.0, 1e-15);
  EXPECT_NEAR(tau_star(s3(0.5, 0.3, 0.2), kSys), oracle::crossing_time({0.5, 0.3, 0.2}, 2, 1), 1e-12);
  EXPECT_NEAR(tau_star(s3(0.5, 0.5, 0.0), kSys), std::log(4.0) / 3.0, 1e-15);
  EXPECT_EQ(tau_star(s3(0.5, 0.25, 0.25), kSys), 0.0);
  EXPECT_THROW(tau_star(s3(1, 0, 0), kSys), Error);
}

TEST(TauStarTest, EqualizedValue) {
  EXPECT_NEAR(lambda2_at_tau_star(s3(0.5, 0.3, 0.2), kSys), 0.225, 1e-15);
  EXPECT_NEAR(lambda2_at_tau_star(s3(0.5, 0.25, 0.25), kSys), 0.25, 1e-15);
  EXPECT_NEAR(lambda2_at_tau_star(s3(0.5, 0.5, 0.0), kSys), 0.125, 1e-15);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const Vec l = oracle::sorted_desc(oracle::random_simplex(3, rng));
    const Spectrum s = Spectrum::from_sorted(l);
    EXPECT_NEAR(lambda2_at_tau_star(s, kSys), l[1] * std::exp(-3.0 * tau_star(s, kSys)), 1e-12);
  }
}

TEST(RegimeTest, BoundaryBelongsToPreEqualization) {
  const Spectrum s = s3(0.5, 0.3, 0.2);
  const double ts = tau_star(s, kSys);
  EXPECT_EQ(regime(s, ts, kSys).regime, Regime::PreEqualization);
  EXPECT_EQ(regime(s, ts + 1e-9, kSys).regime, Regime::Equalized);
  EXPECT_EQ(regime(s, 0.0, kSys).regime, Regime::PreEqualization);
}

TEST(ReturnFunctionTest, HandValues) {
  const Spectrum s = s3(0.5, 0.3, 0.2);
  EXPECT_EQ(return_function(s, 0.0, kSys), 0.5);
  EXPECT_NEAR(return_function(s, 0.05, kSys), 0.5 + 0.2 * (1 - std::exp(-0.15)), 1e-15);
  EXPECT_NEAR(return_function(s, 0.05, kSys), 0.5278584047149885, 1e-15);
  EXPECT_NEAR(return_function(s, 5.0, kSys), 0.9966627683803168, 1e-12);
  EXPECT_NEAR(return_function(s, 60.0, kSys), 1.0, 1e-12);
}

TEST(ReturnFunctionTest, AgreesWithOracleAndGreedySimulation) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 40; ++k) {
    const Vec l = oracle::sorted_desc(oracle::random_simplex(3, rng));
    const double g2 = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    const double g1 = g2 * std::uniform_real_distribution<double>(1.0, 4.0)(rng);
    const LambdaSystem sys(g1, g2);
    const double tau = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const std::array<double, 3> la{l[0], l[1], l[2]};
    const double v = return_function(Spectrum::from_sorted(l), tau, sys);
    EXPECT_NEAR(v, oracle::return_function(la, tau, g1, g2), 1e-12);
    EXPECT_NEAR(v, oracle::greedy_final(la, g1, g2, tau, 20000)[0], 2e-5);
  }
}

// Property: continuity at the switch, monotone in remaining time, bounded by [lambda1, 1).
TEST(ReturnFunctionTest, ShapeProperties) {
  std::mt19937_64 rng(78);
  for (int k = 0; k < 300; ++k) {
    const Spectrum s = Spectrum::from_sorted(oracle::sorted_desc(oracle::random_simplex(3, rng)));
    const double ts = tau_star(s, kSys);
    EXPECT_NEAR(return_function(s, ts - 1e-6 > 0 ? ts - 1e-6 : 0.0, kSys), return_function(s, ts + 1e-6, kSys),
                1e-5);
    double prev = s[0];
    for (double tau = 0.0; tau < 4.0; tau += 0.1) {
      const double v = return_function(s, tau, kSys);
      EXPECT_GE(v, prev - 1e-15);
      EXPECT_LT(v, 1.0);
      prev = v;
    }
  }
}

TEST(MuTest, HandValues) {
  const Spectrum s = s3(0.5, 0.3, 0.2);
  EXPECT_EQ(mu(s, 0.0, kSys), (std::array<double, 3>{1, 0, 0}));
  const auto m = mu(s, 0.05, kSys);
  EXPECT_EQ(m[0], 1.0);
  EXPECT_NEAR(m[1], 2.0 / 3.0 * (1 - std::exp(-0.15)), 1e-15);
  EXPECT_NEAR(m[1], 0.0928614, 1e-7);
  EXPECT_EQ(m[2], 0.0);
  const auto after = mu(s, tau_star(s, kSys) + 1e-13, kSys);
  EXPECT_NEAR(after[0], 0.0, 1e-15);
  EXPECT_NEAR(after[1], -5.0 / 6.0, 1e-12);
  EXPECT_NEAR(after[2], -1.0, 1e-12);
  EXPECT_THROW(mu(s3(1, 0, 0), 1.0, kSys), Error);
}

// Property: ordering everywhere, and continuity at the switch up to a uniform shift.
TEST(MuTest, OrderingAndShiftContinuity) {
  std::mt19937_64 rng(79);
  for (int k = 0; k < 500; ++k) {
    const Spectrum s = Spectrum::from_sorted(oracle::sorted_desc(oracle::random_simplex(3, rng)));
    const double g2 = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const LambdaSystem sys(g2 * std::uniform_real_distribution<double>(1.0, 3.0)(rng), g2);
    const double tau = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    const auto m = mu(s, tau, sys);
    EXPECT_GE(m[0], m[1] - 1e-15);
    EXPECT_GE(m[1], m[2] - 1e-15);
    const double ts = tau_star(s, sys);
    if (ts > 1e-6) {
      const auto lo = mu(s, ts - 1e-9, sys), hi = mu(s, ts + 1e-9, sys);
      EXPECT_NEAR(lo[0] - hi[0], lo[1] - hi[1], 1e-6);
      EXPECT_NEAR(lo[0] - hi[0], lo[2] - hi[2], 1e-6);
    }
  }
}

TEST(MuTest, GradientCheck) {
  EXPECT_TRUE(mu_gradient_check(s3(0.5, 0.3, 0.2), 0.05, kSys).pass);
  EXPECT_TRUE(mu_gradient_check(s3(0.8, 0.1 + 1e-3, 0.1 - 1e-3), 1.0, kSys).pass);
  const auto r = mu_gradient_check(s3(0.5, 0.3, 0.2), 0.0, kSys);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_deviation, 1e-9);
}

TEST(MuTest, GradientCheckAtDegenerateRegimeTwoPoint) {
  // lambda2 = lambda3 exactly sits on the fold; the one-sided gradient along
  // the ordered side still matches.
  const auto r = mu_gradient_check(s3(0.8, 0.1, 0.1), 1.0, kSys);
  EXPECT_LT(r.max_deviation, 1e-5);
}

TEST(GreedyTest, KeepsDegeneracyAndPurifies) {
  const auto one = spectral_propagate(s3(0.5, 0.25, 0.25).values(), greedy_policy(), kSys.generator(), 1e-3, 1e-3);
  // Re-sorting each step holds the pair together only up to one step's drift.
  EXPECT_NEAR(one.states.back()[1], one.states.back()[2], 2e-3);
  const auto traj = spectral_propagate(s3(0.5, 0.3, 0.2).values(), greedy_policy(), kSys.generator(), 5.0, 1e-3);
  EXPECT_GE(traj.states.back()[0], 0.98);
  EXPECT_EQ(greedy_policy().choose(s3(0.5, 0.3, 0.2).values(), 0.0).matrix(), RMatrix::Identity(3, 3));
}

// Property: along the greedy trajectory the top eigenvalue never falls, and
// once the two lower levels are equalized later spectra majorize earlier ones.
TEST(GreedyTest, TopEigenvalueMonotoneAndMajorizationAfterEqualization) {
  std::mt19937_64 rng(80);
  for (int k = 0; k < 20; ++k) {
    const Vec l0 = oracle::sorted_desc(oracle::random_simplex(3, rng));
    const double ts = tau_star(Spectrum::from_sorted(l0), kSys);
    SpectralPropagateOptions opts;
    opts.stride = 20;
    const auto traj = spectral_propagate(l0, greedy_policy(), kSys.generator(), 2.0, 1e-3, opts);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
      EXPECT_GE(traj.states[i][0], traj.states[i - 1][0] - 1e-15);
      if (traj.times[i - 1] > ts + 1e-2) {
        EXPECT_TRUE(oracle::majorized_by(traj.states[i - 1], traj.states[i], 1e-12));
      }
    }
  }
}

// Before equalization the two largest eigenvalues lose weight together
// (d(l1 + l2)/dt = -gamma2 * l2), so the spectrum does not move up in the
// majorization order there.
TEST(GreedyTest, PreEqualizationPhaseIsNotMajorizationMonotone) {
  const auto traj = spectral_propagate(s3(0.5, 0.3, 0.2).values(), greedy_policy(), kSys.generator(), 0.05, 1e-3);
  const Vec& a = traj.states.front();
  const Vec& b = traj.states.back();
  EXPECT_GT(b[0], a[0]);
  EXPECT_LT(b[0] + b[1], a[0] + a[1]);
  EXPECT_FALSE(oracle::majorized_by(a, b));
}

// Stationarity of the value along the optimal trajectory: dV/dt = -dV/dtau + mu . lambda_dot = 0.
TEST(HjbStationarityTest, ValueIsConstantAlongGreedyTrajectory) {
  const double horizon = 3.0;
  SpectralPropagateOptions opts;
  opts.stride = 100;
  const auto traj = spectral_propagate(s3(0.5, 0.3, 0.2).values(), greedy_policy(), kSys.generator(), horizon,
                                       1e-4, opts);
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const Spectrum s = Spectrum::from_unsorted(traj.states[i], 1e-8);
    const double tau = horizon - traj.times[i];
    const double h = 1e-6;
    const double dv_dtau = (return_function(s, tau + h, kSys) - return_function(s, std::max(0.0, tau - h), kSys)) /
                           (tau + h - std::max(0.0, tau - h));
    const auto ctx = lambda_context(s, tau, kSys);
    const double f_id = F(DoublyStochastic::identity(3), ctx);
    EXPECT_LT(std::abs(f_id - dv_dtau), 1e-4) << "t=" << traj.times[i];
  }
}

}  // namespace
}  // namespace dcool
