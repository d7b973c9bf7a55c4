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

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dcool/lindblad.hpp"

namespace dcool {

// Population generator split into off-diagonal gains B and diagonal losses D.
struct SpectralGenerator {
  RMatrix a;  // Q-matrix, zero column sums
  RMatrix b;  // off-diagonal part of a, nonnegative
  RMatrix d;  // diagonal part of a, nonpositive

  Index dim() const noexcept { return a.rows(); }
};

SpectralGenerator build_generator(const RateMatrix& rates);

class DoublyStochastic {
 public:
  static DoublyStochastic make(const RMatrix& theta, double tol = 1e-10);
  static DoublyStochastic identity(Index n);

  const RMatrix& matrix() const noexcept { return theta_; }
  Index dim() const noexcept { return theta_.rows(); }
  double operator()(Index i, Index j) const { return theta_(i, j); }

 private:
  explicit DoublyStochastic(RMatrix theta) : theta_(std::move(theta)) {}
  RMatrix theta_;
};

/// theta_ij = |U_ij|^2.
DoublyStochastic theta_from_unitary(const CMatrix& u, double tol = 1e-10);

/// Diagonal matrix with diagonal theta^T diag(D).
RMatrix theta_compose_D(const DoublyStochastic& theta, const RMatrix& d);

/// M = theta^T B theta + theta^T o D.
RMatrix spectral_matrix(const DoublyStochastic& theta, const SpectralGenerator& gen);

Vec spectral_rhs(const Vec& lambda, const DoublyStochastic& theta, const SpectralGenerator& gen);

/// diag(U^dagger L(U Lambda U^dagger) U), evaluated with the full-matrix dissipator.
Vec spectral_rhs_oracle(const Vec& lambda, const CMatrix& u, const RateMatrix& rates);

// All n! permutation matrices in lexicographic order of the underlying
// permutation; the identity comes first.
std::vector<DoublyStochastic> permutation_matrices(Index n);
std::vector<std::vector<int>> permutations(Index n);

/// Convex combination of `terms` uniformly drawn permutation matrices with
/// flat-Dirichlet weights. Zero terms means n.
DoublyStochastic random_birkhoff(Index n, std::mt19937_64& rng, int terms);

/// |U|^2 of a Haar unitary.
DoublyStochastic random_unistochastic(Index n, std::mt19937_64& rng);

struct SpectralPolicy {
  std::function<DoublyStochastic(const Vec& lambda, double t)> choose;
  // When set, the integrator re-sorts the populations descending after every
  // step (continuous relabelling in the dt -> 0 limit).
  bool order_maintaining = false;
  std::string name;
};

SpectralPolicy identity_policy(Index n);

struct SpectralTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  double max_sum_drift = 0.0;
  double min_component = 1.0;
  // First time the integrator had to re-sort, linearly interpolated inside the
  // step where two adjacent populations crossed.
  std::optional<double> first_reorder_time;
};

struct SpectralPropagateOptions {
  std::size_t stride = 1;
  double sum_tol = 1e-8;
  double neg_tol = 1e-8;
  double theta_tol = 1e-10;
};

double default_dt(const SpectralGenerator& gen);

/// Fixed-step RK4 on lambda' = M(theta) lambda with theta chosen by the policy
/// at the start of each step and held over it.
SpectralTrajectory spectral_propagate(const Vec& lambda0, const SpectralPolicy& policy,
                                      const SpectralGenerator& gen, double horizon, double dt,
                                      const SpectralPropagateOptions& opts = {});

}  // namespace dcool
