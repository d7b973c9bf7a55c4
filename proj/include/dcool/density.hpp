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

#include <string_view>
#include <vector>

#include "dcool/error.hpp"
#include "dcool/types.hpp"

namespace dcool {

struct Tolerances {
  double herm = 1e-10;
  double trace = 1e-10;
  double psd = 1e-10;
  double eig = 1e-9;
};

// Hermitian, unit-trace, positive-semidefinite N x N matrix. Instances can only
// be obtained through validate(), so holding one means the invariants held
// at the tolerances it was checked with.
class DensityMatrix {
 public:
  static DensityMatrix validate(const CMatrix& m, const Tolerances& tol = {});

  /// Diagonal state diag(p); p must lie on the simplex.
  static DensityMatrix diagonal(const Vec& p, const Tolerances& tol = {});

  const CMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

// Eigenvalues of a density matrix, descending, on the probability simplex.
class Spectrum {
 public:
  /// Validates an already descending vector.
  static Spectrum from_sorted(const Vec& values, double trace_tol = 1e-10);
  /// Stable-sorts descending, then validates.
  static Spectrum from_unsorted(const Vec& values, double trace_tol = 1e-10);

  const Vec& values() const noexcept { return v_; }
  Index size() const noexcept { return v_.size(); }
  double operator[](Index i) const { return v_[i]; }

 private:
  explicit Spectrum(Vec v) : v_(std::move(v)) {}
  Vec v_;
};

struct Eigendecomposition {
  Spectrum spectrum;
  CMatrix vectors;  // columns ordered to match spectrum
};

/// Hermitian eigendecomposition with eigenvalues clipped into [0, 1] when the
/// overshoot is within tol.psd.
Eigendecomposition eigendecompose(const DensityMatrix& rho, const Tolerances& tol = {});
Spectrum spectrum(const DensityMatrix& rho, const Tolerances& tol = {});

double purity_largest(const Spectrum& lambda);
double purity_tr2(const Spectrum& lambda);
double entropy_vn(const Spectrum& lambda);

enum class MajorizationOrder { LessThan, GreaterThan, Equal, Incomparable };
std::string_view to_string(MajorizationOrder order);

/// LessThan means x is majorized by y (x is the more mixed vector).
MajorizationOrder majorizes(const Spectrum& x, const Spectrum& y, double tol = 1e-12);

/// Stable descending sort of a plain vector; ties keep their original order.
Vec sorted_descending(const Vec& v);

}  // namespace dcool
