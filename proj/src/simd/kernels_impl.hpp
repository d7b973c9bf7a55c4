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

// Shared between the scalar and AVX2 translation units. Everything here has
// internal linkage so no ISA-specific instantiation can leak across TUs.

#include <cstddef>
#include <cstdint>

namespace dcool::simd::detail {

struct BankView {
  int n;
  std::size_t size;
  const double* const* entries;  // n*n pointers
};

struct TableView {
  int m;
  const std::int32_t* index;
  const double* values;
};

namespace {

// Reference arithmetic for one generator; the AVX2 lanes reproduce it
// operation for operation.
inline bool step_interp_one(const BankView& bank, std::size_t k, const double* lam, double dt,
                            double clip_tol, const TableView& tab, double* out) {
  double x[3];
  for (int r = 0; r < 3; ++r) {
    double p = bank.entries[r * 3 + 0][k] * lam[0];
    p = p + bank.entries[r * 3 + 1][k] * lam[1];
    p = p + bank.entries[r * 3 + 2][k] * lam[2];
    x[r] = lam[r] + dt * p;
  }
  bool ok = true;
  for (double& v : x) {
    if (v < -clip_tol) ok = false;
    v = v < 0.0 ? 0.0 : v;
  }
  const double s = (x[0] + x[1]) + x[2];
  const double md = static_cast<double>(tab.m);
  const double u = (x[0] / s) * md;
  const double v = (x[1] / s) * md;
  double fi = __builtin_floor(u);
  const double top = md - 1.0;
  fi = fi > top ? top : fi;
  double fj = __builtin_floor(v);
  const double jtop = top - fi;
  fj = fj > jtop ? jtop : fj;
  const double fu = u - fi;
  const double fv = v - fj;
  const double t = fu + fv;
  const bool upper = (t > 1.0) && ((fi + fj) + 2.0 <= md);
  const double wa = upper ? t - 1.0 : 1.0 - t;
  const double wb = upper ? 1.0 - fv : fu;
  const double wc = upper ? 1.0 - fu : fv;
  const int i = static_cast<int>(fi);
  const int j = static_cast<int>(fj);
  const int stride = tab.m + 1;
  const int ia = upper ? (i + 1) * stride + (j + 1) : i * stride + j;
  const int ib = (i + 1) * stride + j;
  const int ic = i * stride + (j + 1);
  const double va = tab.values[tab.index[ia]];
  const double vb = tab.values[tab.index[ib]];
  const double vc = tab.values[tab.index[ic]];
  *out = (wa * va + wb * vb) + wc * vc;
  return ok;
}

inline double bilinear_one(const BankView& bank, std::size_t k, const double* w) {
  double acc = 0.0;
  const int nn = bank.n * bank.n;
  for (int e = 0; e < nn; ++e) acc = acc + w[e] * bank.entries[e][k];
  return acc;
}

}  // namespace

void bilinear_forms_scalar(const BankView& bank, const double* w, double* out);
bool step_and_interpolate_scalar(const BankView& bank, const double* lam, double dt,
                                 double clip_tol, const TableView& tab, double* out);

#if defined(DCOOL_HAVE_AVX2)
void bilinear_forms_avx2(const BankView& bank, const double* w, double* out);
bool step_and_interpolate_avx2(const BankView& bank, const double* lam, double dt,
                               double clip_tol, const TableView& tab, double* out);
#endif

}  // namespace dcool::simd::detail
