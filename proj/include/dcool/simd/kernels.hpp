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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dcool/types.hpp"

// Data-parallel inner loops of the HJB engine. Each kernel has a scalar
// reference and an AVX2 variant; both perform the same floating-point
// operations in the same order (no FMA contraction), so results are bitwise
// identical and the backend choice never changes an output file.
namespace dcool::simd {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);
bool backend_available(Backend b);
/// Best available backend; DCOOL_SIMD=scalar in the environment forces the
/// reference path.
Backend default_backend();

// Structure-of-arrays bank of N x N matrices: entry(r, c)[k] is element
// (r, c) of the k-th matrix.
class MatrixBank {
 public:
  explicit MatrixBank(int n);

  void push_back(const RMatrix& m);
  int dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  const double* entry(int r, int c) const { return entries_[static_cast<std::size_t>(r * n_ + c)].data(); }

 private:
  int n_;
  std::size_t size_ = 0;
  std::vector<std::vector<double>> entries_;
};

/// out[k] = sum_{r,c} weights[r*N + c] * M_k(r, c).
void bilinear_forms(Backend backend, const MatrixBank& bank, std::span<const double> weights,
                    std::span<double> out);

// Piecewise-linear function on the lattice {(a, b, c) / m : a + b + c = m}.
// index[(a)*(m+1) + b] maps a lattice point to its slot in `values`; entries
// with a + b > m are never read.
struct SimplexTable {
  int resolution = 0;
  const std::int32_t* index = nullptr;
  const double* values = nullptr;
};

/// For every 3 x 3 generator M_k in the bank: x = lambda + dt * M_k lambda,
/// negative parts clipped, renormalized onto the simplex, then interpolated in
/// `table`. Returns false (out left partially written) if any component of
/// any x fell below -clip_tol.
bool step_and_interpolate(Backend backend, const MatrixBank& bank, const double lambda[3], double dt,
                          double clip_tol, const SimplexTable& table, std::span<double> out);

}  // namespace dcool::simd
