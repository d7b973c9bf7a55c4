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

// Built with -mavx2 and selected at run time only when the CPU reports AVX2.
// Keep this file free of library headers so no AVX2-compiled inline code can
// be picked up by the linker for use elsewhere.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace dcool::simd::detail {

void bilinear_forms_avx2(const BankView& bank, const double* w, double* out) {
  const int nn = bank.n * bank.n;
  std::size_t k = 0;
  for (; k + 4 <= bank.size; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int e = 0; e < nn; ++e) {
      const __m256d m = _mm256_loadu_pd(bank.entries[e] + k);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[e]), m));
    }
    _mm256_storeu_pd(out + k, acc);
  }
  for (; k < bank.size; ++k) out[k] = bilinear_one(bank, k, w);
}

bool step_and_interpolate_avx2(const BankView& bank, const double* lam, double dt,
                               double clip_tol, const TableView& tab, double* out) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d md = _mm256_set1_pd(static_cast<double>(tab.m));
  const __m256d top = _mm256_set1_pd(static_cast<double>(tab.m) - 1.0);
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d neg_tol = _mm256_set1_pd(-clip_tol);
  const __m256d l0 = _mm256_set1_pd(lam[0]);
  const __m256d l1 = _mm256_set1_pd(lam[1]);
  const __m256d l2 = _mm256_set1_pd(lam[2]);
  const __m128i stride = _mm_set1_epi32(tab.m + 1);
  const __m128i ione = _mm_set1_epi32(1);

  bool ok = true;
  std::size_t k = 0;
  for (; k + 4 <= bank.size; k += 4) {
    __m256d x[3];
    const __m256d lv[3] = {l0, l1, l2};
    for (int r = 0; r < 3; ++r) {
      __m256d p = _mm256_mul_pd(_mm256_loadu_pd(bank.entries[r * 3 + 0] + k), l0);
      p = _mm256_add_pd(p, _mm256_mul_pd(_mm256_loadu_pd(bank.entries[r * 3 + 1] + k), l1));
      p = _mm256_add_pd(p, _mm256_mul_pd(_mm256_loadu_pd(bank.entries[r * 3 + 2] + k), l2));
      x[r] = _mm256_add_pd(lv[r], _mm256_mul_pd(vdt, p));
    }
    for (auto& v : x) {
      if (_mm256_movemask_pd(_mm256_cmp_pd(v, neg_tol, _CMP_LT_OQ)) != 0) ok = false;
      v = _mm256_blendv_pd(v, zero, _mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    }
    const __m256d s = _mm256_add_pd(_mm256_add_pd(x[0], x[1]), x[2]);
    const __m256d u = _mm256_mul_pd(_mm256_div_pd(x[0], s), md);
    const __m256d v = _mm256_mul_pd(_mm256_div_pd(x[1], s), md);
    __m256d fi = _mm256_floor_pd(u);
    fi = _mm256_blendv_pd(fi, top, _mm256_cmp_pd(fi, top, _CMP_GT_OQ));
    __m256d fj = _mm256_floor_pd(v);
    const __m256d jtop = _mm256_sub_pd(top, fi);
    fj = _mm256_blendv_pd(fj, jtop, _mm256_cmp_pd(fj, jtop, _CMP_GT_OQ));
    const __m256d fu = _mm256_sub_pd(u, fi);
    const __m256d fv = _mm256_sub_pd(v, fj);
    const __m256d t = _mm256_add_pd(fu, fv);
    const __m256d upper =
        _mm256_and_pd(_mm256_cmp_pd(t, one, _CMP_GT_OQ),
                      _mm256_cmp_pd(_mm256_add_pd(_mm256_add_pd(fi, fj), two), md, _CMP_LE_OQ));
    const __m256d wa = _mm256_blendv_pd(_mm256_sub_pd(one, t), _mm256_sub_pd(t, one), upper);
    const __m256d wb = _mm256_blendv_pd(fu, _mm256_sub_pd(one, fv), upper);
    const __m256d wc = _mm256_blendv_pd(fv, _mm256_sub_pd(one, fu), upper);

    const __m128i i = _mm256_cvttpd_epi32(fi);
    const __m128i j = _mm256_cvttpd_epi32(fj);
    const __m128i up = _mm256_cvtpd_epi32(_mm256_and_pd(upper, one));  // 1 where upper
    const __m128i i1 = _mm_add_epi32(i, ione);
    const __m128i j1 = _mm_add_epi32(j, ione);
    const __m128i ia = _mm_add_epi32(_mm_mullo_epi32(_mm_add_epi32(i, up), stride), _mm_add_epi32(j, up));
    const __m128i ib = _mm_add_epi32(_mm_mullo_epi32(i1, stride), j);
    const __m128i ic = _mm_add_epi32(_mm_mullo_epi32(i, stride), j1);
    const __m128i sa = _mm_i32gather_epi32(tab.index, ia, 4);
    const __m128i sb = _mm_i32gather_epi32(tab.index, ib, 4);
    const __m128i sc = _mm_i32gather_epi32(tab.index, ic, 4);
    const __m256d va = _mm256_i32gather_pd(tab.values, sa, 8);
    const __m256d vb = _mm256_i32gather_pd(tab.values, sb, 8);
    const __m256d vc = _mm256_i32gather_pd(tab.values, sc, 8);
    const __m256d res =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(wa, va), _mm256_mul_pd(wb, vb)), _mm256_mul_pd(wc, vc));
    _mm256_storeu_pd(out + k, res);
  }
  for (; k < bank.size; ++k) ok = step_interp_one(bank, k, lam, dt, clip_tol, tab, out + k) && ok;
  return ok;
}

}  // namespace dcool::simd::detail
