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

#include "dcool/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dcool {

SpectralGenerator build_generator(const RateMatrix& rates) {
  const RMatrix& g = rates.gamma();
  const Index n = g.rows();
  SpectralGenerator gen{g, g, RMatrix::Zero(n, n)};
  const Vec out = g.colwise().sum().transpose();
  for (Index i = 0; i < n; ++i) {
    gen.a(i, i) = -out[i];
    gen.d(i, i) = -out[i];
  }
  return gen;
}

DoublyStochastic DoublyStochastic::make(const RMatrix& theta, double tol) {
  if (theta.rows() != theta.cols() || theta.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "doubly stochastic matrix must be square");
  }
  const double lo = theta.minCoeff();
  const double hi = theta.maxCoeff();
  if (lo < -tol || hi > 1.0 + tol) {
    throw Error(ErrorCode::NotDoublyStochastic, "entries outside [0,1]", std::min(lo, 1.0 - hi));
  }
  const double row = (theta.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double col = (theta.colwise().sum().array() - 1.0).abs().maxCoeff();
  const double dev = std::max(row, col);
  if (dev > tol) throw Error(ErrorCode::NotDoublyStochastic, "row/column sums deviate", dev);
  return DoublyStochastic(theta);
}

DoublyStochastic DoublyStochastic::identity(Index n) {
  return DoublyStochastic(RMatrix::Identity(n, n));
}

DoublyStochastic theta_from_unitary(const CMatrix& u, double tol) {
  const double err = unitarity_error(u);
  if (err > tol) throw Error(ErrorCode::NotUnitary, "matrix is not unitary", err);
  return DoublyStochastic::make(u.cwiseAbs2(), tol);
}

RMatrix theta_compose_D(const DoublyStochastic& theta, const RMatrix& d) {
  if (d.rows() != theta.dim() || d.cols() != theta.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "theta and D dimensions differ");
  }
  const Vec diag = theta.matrix().transpose() * d.diagonal();
  return diag.asDiagonal();
}

RMatrix spectral_matrix(const DoublyStochastic& theta, const SpectralGenerator& gen) {
  if (theta.dim() != gen.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "theta and generator dimensions differ");
  }
  const RMatrix& t = theta.matrix();
  return t.transpose() * gen.b * t + theta_compose_D(theta, gen.d);
}

Vec spectral_rhs(const Vec& lambda, const DoublyStochastic& theta, const SpectralGenerator& gen) {
  if (lambda.size() != gen.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lambda and generator dimensions differ");
  }
  return spectral_matrix(theta, gen) * lambda;
}

Vec spectral_rhs_oracle(const Vec& lambda, const CMatrix& u, const RateMatrix& rates) {
  const double err = unitarity_error(u);
  if (err > 1e-10) throw Error(ErrorCode::NotUnitary, "matrix is not unitary", err);
  if (lambda.size() != rates.dim() || u.rows() != rates.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lambda, U and rates dimensions differ");
  }
  const CMatrix big_lambda = lambda.cast<Complex>().asDiagonal();
  const CMatrix rho = u * big_lambda * u.adjoint();
  const CMatrix rotated = u.adjoint() * dissipator(rho, rates) * u;
  return rotated.diagonal().real();
}

std::vector<std::vector<int>> permutations(Index n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

namespace {

RMatrix permutation_real(const std::vector<int>& perm) {
  const Index n = static_cast<Index>(perm.size());
  RMatrix p = RMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) p(perm[static_cast<std::size_t>(j)], j) = 1.0;
  return p;
}

}  // namespace

std::vector<DoublyStochastic> permutation_matrices(Index n) {
  std::vector<DoublyStochastic> out;
  for (const auto& p : permutations(n)) out.push_back(DoublyStochastic::make(permutation_real(p)));
  return out;
}

DoublyStochastic random_birkhoff(Index n, std::mt19937_64& rng, int terms) {
  if (terms < 0) throw Error(ErrorCode::InvalidArgument, "negative term count", terms);
  if (terms == 0) terms = static_cast<int>(n);
  std::exponential_distribution<double> expo(1.0);
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<double> w(static_cast<std::size_t>(terms));
  for (double& x : w) x = expo(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  RMatrix theta = RMatrix::Zero(n, n);
  for (int k = 0; k < terms; ++k) {
    std::shuffle(p.begin(), p.end(), rng);
    theta += (w[static_cast<std::size_t>(k)] / total) * permutation_real(p);
  }
  return DoublyStochastic::make(theta);
}

DoublyStochastic random_unistochastic(Index n, std::mt19937_64& rng) {
  return DoublyStochastic::make(haar_unitary(n, rng).cwiseAbs2());
}

SpectralPolicy identity_policy(Index n) {
  const DoublyStochastic id = DoublyStochastic::identity(n);
  return {[id](const Vec&, double) { return id; }, false, "identity"};
}

double default_dt(const SpectralGenerator& gen) {
  const double g = gen.b.maxCoeff();
  return g > 0.0 ? 1e-3 / g : 1e-3;
}

SpectralTrajectory spectral_propagate(const Vec& lambda0, const SpectralPolicy& policy,
                                      const SpectralGenerator& gen, double horizon, double dt,
                                      const SpectralPropagateOptions& opts) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive", dt);
  if (!(horizon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0", horizon);
  if (opts.stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
  if (lambda0.size() != gen.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lambda0 and generator dimensions differ");
  }
  const Index n = gen.dim();

  SpectralTrajectory traj;
  std::size_t count = 0;
  auto observe = [&](double t, const Vec& lam, bool force) {
    const double drift = std::abs(lam.sum() - 1.0);
    const double lo = lam.minCoeff();
    traj.max_sum_drift = std::max(traj.max_sum_drift, drift);
    traj.min_component = std::min(traj.min_component, lo);
    if (drift > opts.sum_tol || lo < -opts.neg_tol) {
      throw Error(ErrorCode::InvariantViolation,
                  "spectral invariant broken at t=" + std::to_string(t), t);
    }
    if (force || count % opts.stride == 0) {
      traj.times.push_back(t);
      traj.states.push_back(lam);
    }
    ++count;
  };

  Vec lam = lambda0;
  double t = 0.0;
  observe(t, lam, horizon == 0.0);
  const auto steps = static_cast<long long>(std::ceil(horizon / dt - 1e-9));
  for (long long s = 0; s < steps; ++s) {
    const double h = std::min(dt, horizon - static_cast<double>(s) * dt);
    const DoublyStochastic theta = policy.choose(lam, t);
    // Re-validate here so a policy that drifts off the Birkhoff polytope is
    // rejected rather than silently integrated.
    const RMatrix m = spectral_matrix(DoublyStochastic::make(theta.matrix(), opts.theta_tol), gen);
    const Vec k1 = m * lam;
    const Vec k2 = m * (lam + 0.5 * h * k1);
    const Vec k3 = m * (lam + 0.5 * h * k2);
    const Vec k4 = m * (lam + h * k3);
    Vec next = lam + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = (s + 1 == steps) ? horizon : static_cast<double>(s + 1) * dt;

    if (policy.order_maintaining) {
      if (!traj.first_reorder_time) {
        for (Index k = 0; k + 1 < n; ++k) {
          const double gap_before = lam[k] - lam[k + 1];
          const double gap_after = next[k] - next[k + 1];
          if (gap_after < 0.0) {
            const double frac = gap_before > 0.0 ? gap_before / (gap_before - gap_after) : 0.0;
            traj.first_reorder_time = t + frac * h;
            break;
          }
        }
      }
      next = sorted_descending(next);
    }
    lam = std::move(next);
    t = t_next;
    observe(t, lam, s + 1 == steps);
  }
  return traj;
}

}  // namespace dcool
