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

#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "dcool/error.hpp"
#include "dcool/hjb.hpp"
#include "dcool/lambda3.hpp"
#include "dcool/simd/kernels.hpp"
#include "oracles.hpp"

namespace dcool::simd {
namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

MatrixBank random_bank(int n, std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixBank bank(n);
  for (std::size_t k = 0; k < count; ++k) {
    RMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    bank.push_back(m);
  }
  return bank;
}

TEST(BackendTest, ScalarAlwaysAvailable) {
  EXPECT_TRUE(backend_available(Backend::Scalar));
  EXPECT_EQ(to_string(Backend::Scalar), "scalar");
}

TEST(BilinearTest, ScalarMatchesDirectSum) {
  std::mt19937_64 rng(1);
  for (int n : {2, 3, 4}) {
    const MatrixBank bank = random_bank(n, 13, rng);
    std::vector<double> w(static_cast<std::size_t>(n * n));
    for (auto& x : w) x = std::normal_distribution<double>()(rng);
    std::vector<double> out(13);
    bilinear_forms(Backend::Scalar, bank, w, out);
    for (std::size_t k = 0; k < 13; ++k) {
      double ref = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) ref += w[static_cast<std::size_t>(r * n + c)] * bank.entry(r, c)[k];
      EXPECT_NEAR(out[k], ref, 1e-12);
    }
  }
}

TEST(BilinearTest, RejectsMismatchedSpans) {
  std::mt19937_64 rng(2);
  const MatrixBank bank = random_bank(3, 5, rng);
  std::vector<double> w(9), out(4);
  EXPECT_THROW(bilinear_forms(Backend::Scalar, bank, w, out), Error);
}

class SimdEquivalenceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!backend_available(Backend::Avx2)) GTEST_SKIP() << "AVX2 not available on this machine";
  }
};

// Sizes straddle the 4-lane width so both the vector body and the scalar tail run.
TEST_F(SimdEquivalenceTest, BilinearFormsBitwiseIdentical) {
  std::mt19937_64 rng(3);
  for (std::size_t count : {1u, 3u, 4u, 5u, 8u, 67u, 136u, 1001u}) {
    for (int n : {3, 4}) {
      const MatrixBank bank = random_bank(n, count, rng);
      std::vector<double> w(static_cast<std::size_t>(n * n));
      for (auto& x : w) x = std::normal_distribution<double>()(rng);
      std::vector<double> a(count), b(count);
      bilinear_forms(Backend::Scalar, bank, w, a);
      bilinear_forms(Backend::Avx2, bank, w, b);
      EXPECT_TRUE(bitwise_equal(a, b)) << "count=" << count << " n=" << n;
    }
  }
}

TEST_F(SimdEquivalenceTest, StepAndInterpolateBitwiseIdentical) {
  const LambdaSystem sys(2.0, 1.0);
  DpConfig cfg;
  cfg.m = 20;
  cfg.n_t = 100;
  const auto actions = dp_actions(cfg);
  MatrixBank bank(3);
  for (const auto& a : actions) bank.push_back(spectral_matrix(a.theta, sys.generator()));
  const SimplexGrid grid(cfg.m);
  std::vector<double> values(grid.size());
  std::mt19937_64 rng(4);
  for (auto& v : values) v = std::uniform_real_distribution<double>()(rng);
  const SimplexTable tab{cfg.m, grid.index_table().data(), values.data()};
  for (int k = 0; k < 500; ++k) {
    const Vec l = oracle::random_simplex(3, rng);
    const double lam[3] = {l[0], l[1], l[2]};
    const double dt = k % 5 == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 0.05)(rng);
    std::vector<double> a(bank.size()), b(bank.size());
    const bool ok_a = step_and_interpolate(Backend::Scalar, bank, lam, dt, 1e-9, tab, a);
    const bool ok_b = step_and_interpolate(Backend::Avx2, bank, lam, dt, 1e-9, tab, b);
    EXPECT_EQ(ok_a, ok_b);
    EXPECT_TRUE(bitwise_equal(a, b)) << "sample " << k;
  }
}

TEST_F(SimdEquivalenceTest, DpSolveBitwiseIdentical) {
  const LambdaSystem sys(2.0, 1.0);
  DpConfig cfg;
  cfg.m = 16;
  cfg.n_t = 120;
  const auto a = dp_solve(sys, cfg, Backend::Scalar);
  const auto b = dp_solve(sys, cfg, Backend::Avx2);
  for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_TRUE(bitwise_equal(a.values[k], b.values[k]));
  EXPECT_EQ(a.policy, b.policy);
}

TEST_F(SimdEquivalenceTest, ArgmaxIdenticalAcrossBackends) {
  const LambdaSystem sys(2.0, 1.0);
  std::mt19937_64 rng(5);
  const CandidateSet set(3, ArgmaxConfig{});
  for (int k = 0; k < 50; ++k) {
    const Vec l = oracle::sorted_desc(oracle::random_simplex(3, rng));
    if (l[1] <= 0.0) continue;
    const auto ctx = lambda_context(Spectrum::from_sorted(l), 0.1 * k, sys);
    const auto a = argmax_F(ctx, set, 1e-9, Backend::Scalar);
    const auto b = argmax_F(ctx, set, 1e-9, Backend::Avx2);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.report.winner, b.report.winner);
    EXPECT_EQ(a.report.violation_margin, b.report.violation_margin);
  }
}

TEST(StepInterpolateTest, ReportsUnderflowBeyondClipTolerance) {
  MatrixBank bank(3);
  RMatrix m = RMatrix::Zero(3, 3);
  m(0, 0) = -100.0;  // drives the first component far below zero in one step
  m(1, 0) = 100.0;
  bank.push_back(m);
  const SimplexGrid grid(10);
  std::vector<double> values(grid.size(), 1.0);
  const SimplexTable tab{10, grid.index_table().data(), values.data()};
  const double lam[3] = {0.5, 0.3, 0.2};
  std::vector<double> out(1);
  EXPECT_FALSE(step_and_interpolate(Backend::Scalar, bank, lam, 0.1, 1e-9, tab, out));
  EXPECT_TRUE(step_and_interpolate(Backend::Scalar, bank, lam, 0.001, 1e-9, tab, out));
  EXPECT_DOUBLE_EQ(out[0], 1.0);
}

}  // namespace
}  // namespace dcool::simd
