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
#include <random>
#include <vector>

#include "dcool/density.hpp"

namespace dcool {

// gamma(i, j) is the spontaneous-emission rate from level j to level i.
class RateMatrix {
 public:
  explicit RateMatrix(RMatrix gamma);

  /// Three-level Lambda system: level 2 decays to 1 at gamma1 and to 3 at gamma2.
  static RateMatrix lambda_system(double gamma1, double gamma2);

  const RMatrix& gamma() const noexcept { return gamma_; }
  Index dim() const noexcept { return gamma_.rows(); }
  double max_rate() const { return gamma_.maxCoeff(); }

 private:
  RMatrix gamma_;
};

struct Kick {
  double time;
  CMatrix unitary;
};

// Instantaneous unitary kicks, strictly increasing in time.
class ControlSchedule {
 public:
  ControlSchedule() = default;
  explicit ControlSchedule(std::vector<Kick> kicks);

  const std::vector<Kick>& kicks() const noexcept { return kicks_; }
  bool empty() const noexcept { return kicks_.empty(); }

 private:
  std::vector<Kick> kicks_;
};

bool is_unitary(const CMatrix& u, double tol = 1e-10);
double unitarity_error(const CMatrix& u);

/// Lindblad dissipator for spontaneous emission; accepts any square matrix so
/// it can be used on intermediate integrator stages.
CMatrix dissipator(const CMatrix& rho, const RateMatrix& rates);
CMatrix dissipator(const DensityMatrix& rho, const RateMatrix& rates);

DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u, double tol = 1e-10);

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
  double max_hermiticity_error = 0.0;
};

struct PropagateOptions {
  std::size_t stride = 1;        // emit every stride-th step (the final state is always emitted)
  double trace_tol = 1e-8;
  double psd_tol = 1e-8;
  double herm_tol = 1e-10;
};

/// Default step 1e-3 / max(gamma); falls back to 1e-3 when all rates vanish.
double default_dt(const RateMatrix& rates);

/// Fixed-step RK4 on rho' = L(rho) between kicks; rho <- U rho U^dagger at each
/// kick time. Throws InvariantViolation (magnitude = offending time).
DensityTrajectory propagate(const DensityMatrix& rho0, const RateMatrix& rates,
                            const ControlSchedule& schedule, double horizon, double dt,
                            const PropagateOptions& opts = {});

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// R-diagonal phases folded back into Q.
CMatrix haar_unitary(Index n, std::mt19937_64& rng);
CMatrix haar_unitary(Index n, std::uint64_t seed);

/// Permutation unitary sending basis state j to perm[j].
CMatrix permutation_unitary(const std::vector<int>& perm);

}  // namespace dcool
