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

#include <cstdlib>
#include <string>

#include "dcool/error.hpp"
#include "dcool/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace dcool::simd {

namespace {

class PointerTable {
 public:
  explicit PointerTable(const MatrixBank& bank) : n_(bank.dim()), size_(bank.size()) {
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) ptrs_.push_back(bank.entry(r, c));
  }
  detail::BankView view() const { return {n_, size_, ptrs_.data()}; }

 private:
  int n_;
  std::size_t size_;
  std::vector<const double*> ptrs_;
};

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(DCOOL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Backend default_backend() {
  static const Backend chosen = [] {
    const char* env = std::getenv("DCOOL_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return Backend::Scalar;
    return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
  }();
  return chosen;
}

MatrixBank::MatrixBank(int n) : n_(n), entries_(static_cast<std::size_t>(n * n)) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "bank dimension must be >= 1");
}

void MatrixBank::push_back(const RMatrix& m) {
  if (m.rows() != n_ || m.cols() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "matrix does not match bank dimension");
  }
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) entries_[static_cast<std::size_t>(r * n_ + c)].push_back(m(r, c));
  ++size_;
}

void bilinear_forms(Backend backend, const MatrixBank& bank, std::span<const double> weights,
                    std::span<double> out) {
  if (weights.size() != static_cast<std::size_t>(bank.dim() * bank.dim()) || out.size() != bank.size()) {
    throw Error(ErrorCode::DimensionMismatch, "bilinear_forms buffer sizes");
  }
  const PointerTable t(bank);
#if defined(DCOOL_HAVE_AVX2)
  if (backend == Backend::Avx2 && backend_available(Backend::Avx2)) {
    detail::bilinear_forms_avx2(t.view(), weights.data(), out.data());
    return;
  }
#endif
  (void)backend;
  detail::bilinear_forms_scalar(t.view(), weights.data(), out.data());
}

bool step_and_interpolate(Backend backend, const MatrixBank& bank, const double lambda[3], double dt,
                          double clip_tol, const SimplexTable& table, std::span<double> out) {
  if (bank.dim() != 3 || out.size() != bank.size() || table.resolution < 1) {
    throw Error(ErrorCode::DimensionMismatch, "step_and_interpolate expects 3 x 3 generators");
  }
  const PointerTable t(bank);
  const detail::TableView tab{table.resolution, table.index, table.values};
#if defined(DCOOL_HAVE_AVX2)
  if (backend == Backend::Avx2 && backend_available(Backend::Avx2)) {
    return detail::step_and_interpolate_avx2(t.view(), lambda, dt, clip_tol, tab, out.data());
  }
#endif
  (void)backend;
  return detail::step_and_interpolate_scalar(t.view(), lambda, dt, clip_tol, tab, out.data());
}

}  // namespace dcool::simd
