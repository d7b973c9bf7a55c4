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

#include "dcool/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dcool {

namespace {

std::string fmt_dev(double d) { return "deviation " + std::to_string(d); }

}  // namespace

Vec sorted_descending(const Vec& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return v[a] > v[b]; });
  Vec out(v.size());
  for (Index k = 0; k < v.size(); ++k) out[k] = v[order[static_cast<std::size_t>(k)]];
  return out;
}

DensityMatrix DensityMatrix::validate(const CMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "density matrix must be square and non-empty");
  }
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.herm) throw Error(ErrorCode::NotHermitian, fmt_dev(herm), herm);

  const double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_dev > tol.trace) throw Error(ErrorCode::TraceDeviation, fmt_dev(trace_dev), trace_dev);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "eigensolver did not converge");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.psd) throw Error(ErrorCode::NegativeEigenvalue, fmt_dev(min_eig), min_eig);
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::diagonal(const Vec& p, const Tolerances& tol) {
  CMatrix m = CMatrix::Zero(p.size(), p.size());
  for (Index i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return validate(m, tol);
}

Spectrum Spectrum::from_sorted(const Vec& values, double trace_tol) {
  if (values.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  for (Index k = 0; k + 1 < values.size(); ++k) {
    if (values[k] < values[k + 1]) {
      throw Error(ErrorCode::InvalidArgument, "spectrum not in descending order",
                  values[k + 1] - values[k]);
    }
  }
  if (values.minCoeff() < 0.0) {
    throw Error(ErrorCode::NegativeEigenvalue, "spectrum has negative entry", values.minCoeff());
  }
  const double dev = std::abs(values.sum() - 1.0);
  if (dev > trace_tol) throw Error(ErrorCode::TraceDeviation, fmt_dev(dev), dev);
  return Spectrum(values);
}

Spectrum Spectrum::from_unsorted(const Vec& values, double trace_tol) {
  return from_sorted(sorted_descending(values), trace_tol);
}

Eigendecomposition eigendecompose(const DensityMatrix& rho, const Tolerances& tol) {
  const CMatrix& m = rho.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "eigensolver did not converge");
  }
  const Index n = m.rows();
  // Eigen returns ascending order; reverse it, then stable-sort so exact ties
  // keep the solver's (reversed) order.
  Vec raw = es.eigenvalues().reverse();
  CMatrix vecs = es.eigenvectors().rowwise().reverse();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return raw[a] > raw[b]; });

  Vec vals(n);
  Vec raw_sorted(n);
  CMatrix sorted_vecs(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    const double v = raw[src];
    raw_sorted[k] = v;
    if (v < -tol.psd || v > 1.0 + tol.psd) {
      throw Error(ErrorCode::NegativeEigenvalue, "eigenvalue outside [0,1]: " + std::to_string(v), v);
    }
    vals[k] = std::clamp(v, 0.0, 1.0);
    sorted_vecs.col(k) = vecs.col(src);
  }

  const CMatrix recon = sorted_vecs * raw_sorted.asDiagonal() * sorted_vecs.adjoint();
  const double recon_err = (recon - m).cwiseAbs().maxCoeff();
  if (recon_err > tol.eig) {
    throw Error(ErrorCode::EigensolverFailure, "reconstruction error " + std::to_string(recon_err),
                recon_err);
  }
  // Clipping can move the sum by at most n * psd; the density matrix already
  // passed its own trace check, so validate with a correspondingly loose bound.
  return {Spectrum::from_sorted(vals, tol.trace + static_cast<double>(n) * tol.psd), sorted_vecs};
}

Spectrum spectrum(const DensityMatrix& rho, const Tolerances& tol) {
  return eigendecompose(rho, tol).spectrum;
}

double purity_largest(const Spectrum& lambda) { return lambda[0]; }

double purity_tr2(const Spectrum& lambda) { return lambda.values().squaredNorm(); }

double entropy_vn(const Spectrum& lambda) {
  double s = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    const double p = lambda[i];
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

std::string_view to_string(MajorizationOrder order) {
  switch (order) {
    case MajorizationOrder::LessThan: return "LessThan";
    case MajorizationOrder::GreaterThan: return "GreaterThan";
    case MajorizationOrder::Equal: return "Equal";
    case MajorizationOrder::Incomparable: return "Incomparable";
  }
  return "Unknown";
}

MajorizationOrder majorizes(const Spectrum& x, const Spectrum& y, double tol) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "majorization needs equal lengths");
  }
  bool x_below = true;  // every prefix sum of x <= that of y
  bool y_below = true;
  double sx = 0.0;
  double sy = 0.0;
  for (Index k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    if (sx > sy + tol) x_below = false;
    if (sy > sx + tol) y_below = false;
  }
  if (x_below && y_below) return MajorizationOrder::Equal;
  if (x_below) return MajorizationOrder::LessThan;
  if (y_below) return MajorizationOrder::GreaterThan;
  return MajorizationOrder::Incomparable;
}

}  // namespace dcool
