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

#include "dcool/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dcool {

RateMatrix::RateMatrix(RMatrix gamma) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "rate matrix must be square and non-empty");
  }
  for (Index i = 0; i < gamma_.rows(); ++i) {
    if (gamma_(i, i) != 0.0) throw Error(ErrorCode::InvalidRates, "diagonal rates must be zero");
    for (Index j = 0; j < gamma_.cols(); ++j) {
      if (!(gamma_(i, j) >= 0.0) || !std::isfinite(gamma_(i, j))) {
        throw Error(ErrorCode::InvalidRates, "rates must be finite and nonnegative", gamma_(i, j));
      }
    }
  }
}

RateMatrix RateMatrix::lambda_system(double gamma1, double gamma2) {
  RMatrix g = RMatrix::Zero(3, 3);
  g(0, 1) = gamma1;
  g(2, 1) = gamma2;
  return RateMatrix(g);
}

ControlSchedule::ControlSchedule(std::vector<Kick> kicks) : kicks_(std::move(kicks)) {
  for (std::size_t k = 0; k < kicks_.size(); ++k) {
    if (k > 0 && !(kicks_[k].time > kicks_[k - 1].time)) {
      throw Error(ErrorCode::InvalidArgument, "kick times must be strictly increasing");
    }
    const double err = unitarity_error(kicks_[k].unitary);
    if (err > 1e-10) throw Error(ErrorCode::NotUnitary, "kick is not unitary", err);
  }
}

double unitarity_error(const CMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

bool is_unitary(const CMatrix& u, double tol) { return unitarity_error(u) <= tol; }

CMatrix dissipator(const CMatrix& rho, const RateMatrix& rates) {
  const RMatrix& g = rates.gamma();
  const Index n = g.rows();
  if (rho.rows() != n || rho.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "rho and rate matrix dimensions differ");
  }
  // E_ij rho E_ij^dagger = rho_jj |i><i|, E_ij^dagger E_ij = |j><j|, so
  // L(rho)_kl = delta_kl sum_j g_kj rho_jj - (out_k + out_l) / 2 rho_kl
  // with out_j the total decay rate out of level j.
  const Vec out = g.colwise().sum().transpose();
  CMatrix res(n, n);
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) res(k, l) = -0.5 * (out[k] + out[l]) * rho(k, l);
  }
  for (Index k = 0; k < n; ++k) {
    Complex gain = 0.0;
    for (Index j = 0; j < n; ++j) gain += g(k, j) * rho(j, j);
    res(k, k) += gain;
  }
  return res;
}

CMatrix dissipator(const DensityMatrix& rho, const RateMatrix& rates) {
  return dissipator(rho.matrix(), rates);
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u, double tol) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "unitary and rho dimensions differ");
  }
  const double err = unitarity_error(u);
  if (err > tol) throw Error(ErrorCode::NotUnitary, "matrix is not unitary", err);
  CMatrix out = u * rho.matrix() * u.adjoint();
  // Restore exact Hermiticity lost to rounding in the triple product.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::validate(out);
}

double default_dt(const RateMatrix& rates) {
  const double g = rates.max_rate();
  return g > 0.0 ? 1e-3 / g : 1e-3;
}

namespace {

CMatrix rk4_step(const CMatrix& rho, const RateMatrix& rates, double h) {
  const CMatrix k1 = dissipator(rho, rates);
  const CMatrix k2 = dissipator(CMatrix(rho + 0.5 * h * k1), rates);
  const CMatrix k3 = dissipator(CMatrix(rho + 0.5 * h * k2), rates);
  const CMatrix k4 = dissipator(CMatrix(rho + h * k3), rates);
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class TrajectoryRecorder {
 public:
  TrajectoryRecorder(DensityTrajectory& traj, const PropagateOptions& opts)
      : traj_(traj), opts_(opts) {}

  // Checks invariants on every step and stores every stride-th state.
  void observe(double t, const CMatrix& rho, bool force_emit) {
    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    traj_.max_trace_drift = std::max(traj_.max_trace_drift, drift);
    traj_.max_hermiticity_error = std::max(traj_.max_hermiticity_error, herm);
    traj_.min_eigenvalue = std::min(traj_.min_eigenvalue, min_eig);
    if (drift > opts_.trace_tol || min_eig < -opts_.psd_tol || herm > opts_.herm_tol) {
      throw Error(ErrorCode::InvariantViolation,
                  "density invariant broken at t=" + std::to_string(t) + " (trace drift " +
                      std::to_string(drift) + ", min eigenvalue " + std::to_string(min_eig) + ")",
                  t);
    }
    if (force_emit || count_ % opts_.stride == 0) {
      Tolerances tol;
      tol.trace = opts_.trace_tol;
      tol.psd = opts_.psd_tol;
      tol.herm = opts_.herm_tol;
      traj_.times.push_back(t);
      traj_.states.push_back(DensityMatrix::validate(rho, tol));
    }
    ++count_;
  }

 private:
  DensityTrajectory& traj_;
  const PropagateOptions& opts_;
  std::size_t count_ = 0;
};

}  // namespace

DensityTrajectory propagate(const DensityMatrix& rho0, const RateMatrix& rates,
                            const ControlSchedule& schedule, double horizon, double dt,
                            const PropagateOptions& opts) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive", dt);
  if (!(horizon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0", horizon);
  if (opts.stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
  if (rates.dim() != rho0.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "rho and rate matrix dimensions differ");
  }
  for (const Kick& k : schedule.kicks()) {
    if (k.time < 0.0 || k.time > horizon) {
      throw Error(ErrorCode::InvalidArgument, "kick time outside [0, T]", k.time);
    }
    if (k.unitary.rows() != rho0.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "kick dimension differs from rho");
    }
  }

  DensityTrajectory traj;
  TrajectoryRecorder rec(traj, opts);
  CMatrix rho = rho0.matrix();
  double t = 0.0;
  std::size_t next_kick = 0;
  const auto& kicks = schedule.kicks();

  auto apply_due_kicks = [&] {
    while (next_kick < kicks.size() && kicks[next_kick].time <= t) {
      const CMatrix& u = kicks[next_kick].unitary;
      rho = u * rho * u.adjoint();
      rho = 0.5 * (rho + rho.adjoint()).eval();
      ++next_kick;
    }
  };

  apply_due_kicks();
  rec.observe(t, rho, horizon == 0.0);
  // Steps land exactly on kick times and on the horizon; between those the
  // step is dt, with the last step of each segment shortened as needed.
  double segment_start = 0.0;
  long long in_segment = 0;
  while (t < horizon) {
    const double segment_end = next_kick < kicks.size() ? kicks[next_kick].time : horizon;
    const double remaining = segment_end - t;
    const bool last_in_segment = remaining <= dt * (1.0 + 1e-12);
    const double h = last_in_segment ? remaining : dt;
    if (h > 0.0) rho = rk4_step(rho, rates, h);
    ++in_segment;
    t = last_in_segment ? segment_end : segment_start + static_cast<double>(in_segment) * dt;
    if (last_in_segment) {
      segment_start = segment_end;
      in_segment = 0;
    }
    apply_due_kicks();
    if (h > 0.0) rec.observe(t, rho, t >= horizon);
  }
  return traj;
}

CMatrix haar_unitary(Index n, std::mt19937_64& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "unitary dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

CMatrix haar_unitary(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_unitary(n, rng);
}

CMatrix permutation_unitary(const std::vector<int>& perm) {
  const Index n = static_cast<Index>(perm.size());
  CMatrix p = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const int i = perm[static_cast<std::size_t>(j)];
    if (i < 0 || i >= n) throw Error(ErrorCode::InvalidArgument, "invalid permutation");
    p(i, j) = 1.0;
  }
  if (!is_unitary(p, 0.0)) throw Error(ErrorCode::InvalidArgument, "invalid permutation");
  return p;
}

}  // namespace dcool
