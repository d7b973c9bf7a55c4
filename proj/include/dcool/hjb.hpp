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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcool/lambda3.hpp"
#include "dcool/simd/kernels.hpp"

namespace dcool {

// mu^T (theta^T B theta + theta^T o D) lambda is maximized over theta.
struct ObjectiveContext {
  Vec mu;
  Vec lambda;
  SpectralGenerator gen;
};

/// Context with mu taken from the closed-form co-state of the Lambda system.
ObjectiveContext lambda_context(const Spectrum& lambda, double tau, const LambdaSystem& sys);

/// mu shifted so that mu[1] = 0; F is unchanged.
Vec gauge_mu2_zero(const Vec& mu);

double F(const DoublyStochastic& theta, const ObjectiveContext& ctx);

enum class CandidateFamily { Permutation, Haar, Birkhoff, TriangleGrid };
std::string to_string(CandidateFamily f);

struct ArgmaxConfig {
  int n_haar = 64;
  int n_birkhoff = 64;
  int birkhoff_terms = 0;   // 0 means N terms
  int triangle_grid = 11;   // points per edge of the (theta21, theta23) grid, N = 3 only; 0 disables
  std::uint64_t seed = 20240611;
  double tie_tol = 1e-9;
};

struct Candidate {
  CandidateFamily family;
  DoublyStochastic theta;
};

// Candidate matrices and their generators packed for the batched kernel. The
// first candidate is always the identity.
class CandidateSet {
 public:
  CandidateSet(Index n, const ArgmaxConfig& cfg);

  const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
  Index dim() const noexcept { return n_; }

 private:
  Index n_;
  std::vector<Candidate> candidates_;
};

struct FamilySummary {
  CandidateFamily family;
  std::size_t count = 0;
  double best = 0.0;
  std::vector<double> top;  // up to five largest values, descending
};

struct ArgmaxReport {
  std::vector<FamilySummary> families;
  double f_identity = 0.0;
  double violation_margin = 0.0;      // max_k F(theta_k) - F(I)
  std::vector<std::size_t> ties;      // candidate indices within tie_tol of the maximum
  std::size_t winner = 0;
  bool winner_is_identity = false;
};

struct ArgmaxResult {
  DoublyStochastic theta;
  double value;
  ArgmaxReport report;
};

/// Best candidate; ties within tie_tol go to the identity, then to the first
/// candidate in family order (permutations in lexicographic order first).
ArgmaxResult argmax_F(const ObjectiveContext& ctx, const CandidateSet& set, double tie_tol = 1e-9,
                      simd::Backend backend = simd::default_backend());
ArgmaxResult argmax_F(const ObjectiveContext& ctx, const ArgmaxConfig& cfg = {});

/// Doubly stochastic matrix with theta13 = theta31 = 0 parametrized by
/// (theta21, theta23).
DoublyStochastic embed_restricted(double theta21, double theta23);

/// F on the reduced triangle 0 <= theta21, theta23, theta21 + theta23 <= 1.
double F_restricted(double theta21, double theta23, const ObjectiveContext& ctx);

struct HessianReport {
  Eigen::Matrix2d g;  // rows/cols ordered (theta21, theta23)
  double a;
  double b;
  double det;
  double identity_residual;  // |det + (a - b)^2|
};

HessianReport hessian_G(const ObjectiveContext& ctx);

/// Central second differences of F on embedded matrices at an interior point.
Eigen::Matrix2d hessian_finite_difference(const ObjectiveContext& ctx, double theta21,
                                          double theta23, double step = 1e-3);

/// (dF/dtheta21, dF/dtheta23) at theta = I from the closed-form expressions.
std::pair<double, double> boundary_slopes(const ObjectiveContext& ctx);
/// Second-order one-sided differences of F_restricted at (0, 0).
std::pair<double, double> boundary_slopes_finite_difference(const ObjectiveContext& ctx,
                                                            double step = 1e-4);

struct CoherenceExchangeReport {
  double f_before = 0.0;
  double f_after_first = 0.0;
  double f_after_second = 0.0;
  RMatrix theta_after_first;
  RMatrix theta_after_second;
  bool nondecreasing = true;
};

/// Moves mass out of theta13/theta31 (then out of theta31/theta12) into
/// theta11, theta33 and theta32. Requires theta31 >= theta13.
CoherenceExchangeReport coherence_exchange_check(const ObjectiveContext& ctx,
                                                 const DoublyStochastic& theta,
                                                 double tol = 1e-12);

// ---------------------------------------------------------------------------
// Backward induction on the ordered simplex.

// Lattice points (a, b, c)/m with a >= b >= c and a + b + c = m.
class SimplexGrid {
 public:
  explicit SimplexGrid(int m);

  int resolution() const noexcept { return m_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::array<int, 3>& point(std::size_t i) const { return points_[i]; }
  Vec lambda(std::size_t i) const;
  /// Slot of any lattice point (in any order) after sorting its coordinates.
  std::int32_t index_of(int a, int b) const;
  const std::vector<std::int32_t>& index_table() const noexcept { return index_; }
  /// Strictly ordered with all three components positive.
  bool interior(std::size_t i) const;

 private:
  int m_;
  std::vector<std::array<int, 3>> points_;
  std::vector<std::int32_t> index_;  // (m+1)^2, row a, column b
};

enum class ActionKind { Permutation, Haar, Triangle };
std::string to_string(ActionKind k);

struct DpAction {
  ActionKind kind;
  DoublyStochastic theta;
  bool identity;
};

struct DpConfig {
  double horizon = 1.0;
  int n_t = 2000;
  int m = 60;
  bool permutations = true;
  int n_haar = 64;
  int triangle_grid = 11;
  std::uint64_t seed = 20240611;
  double tie_tol = 1e-9;
  double clip_tol = 1e-9;
};

std::vector<DpAction> dp_actions(const DpConfig& cfg);

struct ValueTable {
  SimplexGrid grid;
  double dt;
  std::vector<double> times;                        // times[k] = k * dt, k = 0..n_t
  std::vector<std::vector<double>> values;          // values[k][point]
  std::vector<std::vector<std::uint16_t>> policy;   // policy[k][point], k < n_t
  std::vector<DpAction> actions;

  int n_t() const { return static_cast<int>(times.size()) - 1; }
  double horizon() const { return times.back(); }
  /// Piecewise-linear interpolation of the slice at time index k.
  double interpolate(const Vec& lambda, int k) const;
};

ValueTable dp_solve(const LambdaSystem& sys, const DpConfig& cfg,
                    simd::Backend backend = simd::default_backend());

struct DpComparison {
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
  std::size_t interior_points = 0;
  double permutation_policy_fraction = 0.0;  // interior cells choosing a permutation vertex
  double identity_policy_fraction = 0.0;
};

/// Compares the t = 0 slice with the closed-form return function at tau = T
/// over interior grid points; policy fractions cover every t < T slice.
DpComparison compare_with_analytic(const ValueTable& table, const LambdaSystem& sys);

}  // namespace dcool
