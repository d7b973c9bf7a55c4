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

// Reference computations used by the tests. Everything here is written from
// first principles with Eigen and the standard library only, so the tests do
// not check the library against itself.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline CMat jump(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  CMat e = CMat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// Sum over jump operators E_ij = |i><j| written out literally.
inline CMat dissipator(const CMat& rho, const RMat& gamma) {
  const auto n = rho.rows();
  CMat out = CMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (gamma(i, j) == 0.0) continue;
      const CMat e = jump(n, i, j);
      const CMat ede = e.adjoint() * e;
      out += gamma(i, j) * (e * rho * e.adjoint() - 0.5 * (ede * rho + rho * ede));
    }
  }
  return out;
}

inline RMat lambda_rates(double g1, double g2) {
  RMat g = RMat::Zero(3, 3);
  g(0, 1) = g1;
  g(2, 1) = g2;
  return g;
}

// Populations of the uncontrolled Lambda system: the excited level decays at
// rate s into the two ground levels in proportion g1 : g2.
inline std::array<double, 3> lambda_populations(const std::array<double, 3>& p0, double g1, double g2, double t) {
  const double s = g1 + g2;
  const double lost = p0[1] * (1.0 - std::exp(-s * t));
  return {p0[0] + g1 / s * lost, p0[1] - lost, p0[2] + g2 / s * lost};
}

// First time at which the uncontrolled middle population falls to the rising
// third one, by bisection.
inline double crossing_time(const std::array<double, 3>& p0, double g1, double g2) {
  auto gap = [&](double t) {
    const auto p = lambda_populations(p0, g1, g2, t);
    return p[1] - p[2];
  };
  double lo = 0.0, hi = 1.0;
  while (gap(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Greedy strategy integrated directly: classical RK4 on the population rate
// equations, with the populations relabelled largest-first after every step.
inline std::array<double, 3> greedy_final(std::array<double, 3> p, double g1, double g2, double horizon, int steps) {
  const double h = horizon / steps;
  auto rhs = [&](const std::array<double, 3>& q) {
    return std::array<double, 3>{g1 * q[1], -(g1 + g2) * q[1], g2 * q[1]};
  };
  for (int k = 0; k < steps; ++k) {
    std::array<double, 3> a = rhs(p), tmp{}, b{}, c{}, d{};
    for (int i = 0; i < 3; ++i) tmp[i] = p[i] + 0.5 * h * a[i];
    b = rhs(tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = p[i] + 0.5 * h * b[i];
    c = rhs(tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = p[i] + h * c[i];
    d = rhs(tmp);
    for (int i = 0; i < 3; ++i) p[i] += h / 6.0 * (a[i] + 2 * b[i] + 2 * c[i] + d[i]);
    std::sort(p.begin(), p.end(), std::greater<>());
  }
  return p;
}

// Right side of the reduced equation computed through the full density
// matrix: diag(U^dag L(U diag(lambda) U^dag) U).
inline RVec reduced_rhs(const RVec& lambda, const CMat& u, const RMat& gamma) {
  const CMat rho = u * lambda.cast<C>().asDiagonal() * u.adjoint();
  return (u.adjoint() * dissipator(rho, gamma) * u).diagonal().real();
}

// Haar unitary via Gram-Schmidt on a complex Gaussian matrix.
inline CMat haar(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = C(g(rng), g(rng));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) z.col(j) -= z.col(k).dot(z.col(j)) * z.col(k);
    z.col(j) /= z.col(j).norm();
  }
  return z;
}

inline RMat squared_modulus(const CMat& u) { return u.cwiseAbs2(); }

inline RVec random_simplex(Eigen::Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  RVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

inline RVec sorted_desc(RVec v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

// x is majorized by y.
inline bool majorized_by(const RVec& x, const RVec& y, double tol = 1e-12) {
  const RVec a = sorted_desc(x), b = sorted_desc(y);
  double sa = 0.0, sb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sa > sb + tol) return false;
  }
  return true;
}

// Robin-Hood transfer: move mass from a richer entry to a poorer one without
// reversing their order. The result is majorized by the input.
inline RVec robin_hood(const RVec& y, std::mt19937_64& rng) {
  RVec x = y;
  std::uniform_int_distribution<Eigen::Index> pick(0, y.size() - 1);
  Eigen::Index i = pick(rng), j = pick(rng);
  if (x[i] < x[j]) std::swap(i, j);
  const double room = 0.5 * (x[i] - x[j]);
  const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * room;
  x[i] -= t;
  x[j] += t;
  return x;
}

// Lambda-system return function and co-state written from the two regime
// formulas, using the crossing time from bisection instead of its closed form.
inline double return_function(const std::array<double, 3>& l, double tau, double g1, double g2) {
  const double s = g1 + g2;
  if (l[1] == 0.0) return l[0];
  const double ts = l[1] > l[2] ? crossing_time(l, g1, g2) : 0.0;
  if (tau <= ts) return l[0] + g1 / s * l[1] * (1.0 - std::exp(-s * tau));
  const double l2 = lambda_populations(l, g1, g2, ts)[1];
  return 1.0 - 2.0 * l2 * std::exp(-0.5 * g1 * (tau - ts));
}

// Bilinear objective mu^T M lambda with M built from its definition.
inline double objective(const RMat& theta, const RVec& mu, const RVec& lambda, const RMat& gamma) {
  const auto n = gamma.rows();
  RMat a = gamma;
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = -gamma.col(i).sum();
  RMat b = a;
  b.diagonal().setZero();
  const RVec d = a.diagonal();
  RMat m = theta.transpose() * b * theta;
  const RVec td = theta.transpose() * d;
  m.diagonal() += td;
  return mu.dot(m * lambda);
}

}  // namespace oracle
