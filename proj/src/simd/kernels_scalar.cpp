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

#include "kernels_impl.hpp"

namespace dcool::simd::detail {

void bilinear_forms_scalar(const BankView& bank, const double* w, double* out) {
  for (std::size_t k = 0; k < bank.size; ++k) out[k] = bilinear_one(bank, k, w);
}

bool step_and_interpolate_scalar(const BankView& bank, const double* lam, double dt,
                                 double clip_tol, const TableView& tab, double* out) {
  bool ok = true;
  for (std::size_t k = 0; k < bank.size; ++k) {
    ok = step_interp_one(bank, k, lam, dt, clip_tol, tab, out + k) && ok;
  }
  return ok;
}

}  // namespace dcool::simd::detail
