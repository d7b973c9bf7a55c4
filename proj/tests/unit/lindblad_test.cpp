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

#include "dcool/density.hpp"
#include "dcool/error.hpp"
#include "dcool/lindblad.hpp"
#include "oracles.hpp"

namespace dcool {
namespace {

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

CMatrix random_density(Index n, std::mt19937_64& rng) {
  const CMatrix u = oracle::haar(n, rng);
  const Vec l = oracle::random_simplex(n, rng);
  CMatrix rho = u * l.cast<Complex>().asDiagonal() * u.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

TEST(RateMatrixTest, RejectsInvalidRates) {
  RMatrix g = RMatrix::Zero(3, 3);
  g(0, 1) = -1.0;
  EXPECT_THROW(RateMatrix{g}, Error);
  g(0, 1) = 1.0;
  g(1, 1) = 1.0;
  EXPECT_THROW(RateMatrix{g}, Error);
  EXPECT_THROW(RateMatrix{RMatrix::Zero(2, 3)}, Error);
  EXPECT_NO_THROW(RateMatrix::lambda_system(2.0, 1.0));
}

TEST(DissipatorTest, ExcitedPopulationFeedsBothGroundLevels) {
  const RateMatrix r = RateMatrix::lambda_system(2.0, 1.0);
  const CMatrix l = dissipator(DensityMatrix::diagonal(v3(0, 1, 0)), r);
  EXPECT_LT((l - v3(2, -3, 1).cast<Complex>().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(dissipator(DensityMatrix::diagonal(v3(1, 0, 0)), r).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DissipatorTest, MatchesTermByTermSum) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    RMatrix g = oracle::lambda_rates(2.0, 1.0);
    if (trial % 2 == 0) {
      const Index n = 3 + trial % 3;
      std::uniform_real_distribution<double> rate(0.0, 2.0);
      g = RMatrix::Zero(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          if (i != j) g(i, j) = rate(rng);
    }
    const Index dim = g.rows();
    const CMatrix rho = random_density(dim, rng);
    const CMatrix lib = dissipator(rho, RateMatrix(g));
    const CMatrix ref = oracle::dissipator(rho, g);
    EXPECT_LT((lib - ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(std::abs(lib.trace()), 1e-12);
    EXPECT_LT((lib - lib.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DissipatorTest, DimensionMismatch) {
  EXPECT_THROW(dissipator(CMatrix::Identity(2, 2) / 2.0, RateMatrix::lambda_system(2, 1)), Error);
}

TEST(PropagateTest, ExcitedStateDecayMatchesClosedForm) {
  const RateMatrix r = RateMatrix::lambda_system(2.0, 1.0);
  const auto traj = propagate(DensityMatrix::diagonal(v3(0, 1, 0)), r, {}, 1.0, 1e-3);
  const Vec pop = traj.states.back().matrix().diagonal().real();
  const auto ref = oracle::lambda_populations({0, 1, 0}, 2.0, 1.0, 1.0);
  EXPECT_NEAR(ref[0], 0.6334752877547574, 1e-15);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(pop[i], ref[static_cast<std::size_t>(i)], 1e-6);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
  EXPECT_LE(traj.max_trace_drift, 1e-8);
  EXPECT_GE(traj.min_eigenvalue, -1e-8);
}

TEST(PropagateTest, GroundStateIsStationary) {
  const auto traj =
      propagate(DensityMatrix::diagonal(v3(1, 0, 0)), RateMatrix::lambda_system(2.0, 1.0), {}, 2.0, 1e-2);
  for (const auto& s : traj.states) EXPECT_EQ(s.matrix(), DensityMatrix::diagonal(v3(1, 0, 0)).matrix());
}

TEST(PropagateTest, SwapKickThenDecaySplitsPopulationByRates) {
  const CMatrix swap = permutation_unitary({1, 0, 2});
  const ControlSchedule sched({{0.0, swap}});
  const auto traj =
      propagate(DensityMatrix::diagonal(v3(1, 0, 0)), RateMatrix::lambda_system(2.0, 1.0), sched, 20.0, 1e-2);
  const Vec pop = traj.states.back().matrix().diagonal().real();
  EXPECT_NEAR(pop[0] / pop[2], 2.0, 1e-9);
  EXPECT_NEAR(pop[1], 0.0, 1e-12);
}

TEST(PropagateTest, StepsLandOnKickTimes) {
  const ControlSchedule sched({{0.2505, permutation_unitary({1, 0, 2})}});
  const auto traj = propagate(DensityMatrix::diagonal(v3(0.2, 0.5, 0.3)), RateMatrix::lambda_system(2.0, 1.0),
                              sched, 0.5, 1e-3);
  EXPECT_NE(std::find(traj.times.begin(), traj.times.end(), 0.2505), traj.times.end());
  const auto p0 = oracle::lambda_populations({0.2, 0.5, 0.3}, 2.0, 1.0, 0.2505);
  const auto p1 = oracle::lambda_populations({p0[1], p0[0], p0[2]}, 2.0, 1.0, 0.5 - 0.2505);
  const Vec pop = traj.states.back().matrix().diagonal().real();
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(pop[i], p1[static_cast<std::size_t>(i)], 1e-10);
}

TEST(PropagateTest, FourthOrderConvergence) {
  const auto ref = oracle::lambda_populations({0, 1, 0}, 2.0, 1.0, 1.0);
  auto err = [&](double dt) {
    const auto traj =
        propagate(DensityMatrix::diagonal(v3(0, 1, 0)), RateMatrix::lambda_system(2.0, 1.0), {}, 1.0, dt);
    return std::abs(traj.states.back().matrix()(1, 1).real() - ref[1]);
  };
  const double ratio = err(0.05) / err(0.025);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

// Property: conservation and positivity across random rates, states and kicks.
TEST(PropagateTest, RandomizedInvariantSuite) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + trial % 2;
    RMatrix g = RMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j) g(i, j) = rate(rng);
    const ControlSchedule sched({{0.3, haar_unitary(n, rng)}, {0.7, haar_unitary(n, rng)}});
    PropagateOptions opts;
    opts.stride = 50;
    const auto traj = propagate(DensityMatrix::validate(random_density(n, rng)), RateMatrix(g), sched, 1.0,
                                default_dt(RateMatrix(g)), opts);
    EXPECT_LE(traj.max_trace_drift, 1e-8);
    EXPECT_GE(traj.min_eigenvalue, -1e-8);
    EXPECT_LE(traj.max_hermiticity_error, 1e-10);
  }
}

TEST(PropagateTest, RejectsBadArguments) {
  const auto rho = DensityMatrix::diagonal(v3(1, 0, 0));
  const auto r = RateMatrix::lambda_system(2.0, 1.0);
  EXPECT_THROW(propagate(rho, r, {}, 1.0, 0.0), Error);
  EXPECT_THROW(propagate(rho, r, {}, -1.0, 1e-3), Error);
  EXPECT_THROW(ControlSchedule({{0.5, CMatrix::Identity(3, 3)}, {0.2, CMatrix::Identity(3, 3)}}), Error);
  EXPECT_THROW(ControlSchedule({{0.5, 2.0 * CMatrix::Identity(3, 3)}}), Error);
}

TEST(ApplyUnitaryTest, PreservesSpectrum) {
  const auto rho = DensityMatrix::diagonal(v3(0.5, 0.3, 0.2));
  EXPECT_EQ(apply_unitary(rho, CMatrix::Identity(3, 3)).matrix(), rho.matrix());
  const auto flipped = apply_unitary(rho, permutation_unitary({2, 1, 0}));
  EXPECT_LT((flipped.matrix().diagonal().real() - v3(0.2, 0.3, 0.5)).cwiseAbs().maxCoeff(), 1e-15);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto out = apply_unitary(rho, haar_unitary(3, seed));
    EXPECT_LT((spectrum(out).values() - v3(0.5, 0.3, 0.2)).cwiseAbs().maxCoeff(), 1e-10);
  }
  try {
    apply_unitary(rho, 1.1 * CMatrix::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnitary);
  }
}

TEST(HaarTest, DeterministicAndUnitary) {
  const CMatrix a = haar_unitary(3, 123), b = haar_unitary(3, 123);
  EXPECT_EQ(a, b);
  EXPECT_LT(unitarity_error(a), 1e-12);
  EXPECT_NEAR(std::abs(haar_unitary(1, 5)(0, 0)), 1.0, 1e-15);
}

TEST(HaarTest, FirstEntryHasUniformWeight) {
  std::mt19937_64 rng(4);
  double sum = 0.0, col = 0.0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const CMatrix u = haar_unitary(3, rng);
    sum += std::norm(u(0, 0));
    col += std::norm(u(2, 1));
  }
  EXPECT_NEAR(sum / n, 1.0 / 3.0, 0.01);
  EXPECT_NEAR(col / n, 1.0 / 3.0, 0.01);
}

}  // namespace
}  // namespace dcool
