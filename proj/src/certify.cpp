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

#include "dcool/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dcool {

bool CertifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& CertifyReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorCode::InvalidArgument, "no check named " + name);
}

std::vector<CertifyContext> certification_lattice(const CertifyConfig& cfg) {
  std::vector<CertifyContext> out;
  const int r = cfg.lambda_resolution;
  for (const auto& [g1, g2] : cfg.systems) {
    const LambdaSystem sys(g1, g2);
    for (int a = r; a >= 0; --a) {
      for (int b = std::min(a, r - a); b >= 1; --b) {
        const int c = r - a - b;
        if (c > b) break;
        const Vec l{{double(a) / r, double(b) / r, double(c) / r}};
        const Spectrum s = Spectrum::from_sorted(l, 1e-12);
        const double ts = tau_star(s, sys);
        std::vector<double> taus = cfg.tau_absolute;
        if (ts > 0.0) {
          for (double f : cfg.tau_fractions) taus.push_back(f * ts);
        }
        for (double tau : taus) out.push_back({g1, g2, l, tau, ts});
      }
    }
  }
  return out;
}

namespace {

class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, double threshold, bool upper_bound)
      : r_{std::move(name), true, upper_bound ? -INFINITY : INFINITY, threshold, 0},
        upper_(upper_bound) {}

  // upper bound: value <= threshold passes; otherwise value >= threshold passes.
  void add(double value) {
    ++r_.count;
    if (upper_) {
      r_.worst = std::max(r_.worst, value);
      if (!(value <= r_.threshold)) r_.passed = false;
    } else {
      r_.worst = std::min(r_.worst, value);
      if (!(value >= r_.threshold)) r_.passed = false;
    }
  }
  void fail() { r_.passed = false; }
  CheckResult result() const {
    CheckResult r = r_;
    if (r.count == 0) r.worst = 0.0;
    return r;
  }

 private:
  CheckResult r_;
  bool upper_;
};

}  // namespace

CertifyReport run_certification(const CertifyConfig& cfg) {
  const auto lattice = certification_lattice(cfg);
  const CandidateSet candidates(3, cfg.argmax);

  CheckAccumulator argmax("argmax_identity", cfg.argmax_tol, true);
  CheckAccumulator gauge("shift_gauge_null", 1e-12, true);
  CheckAccumulator ordering("mu_ordering", -1e-12, false);
  CheckAccumulator hess_id("hessian_identity", cfg.hessian_identity_tol, true);
  CheckAccumulator hess_fd("hessian_finite_difference", cfg.hessian_fd_tol, true);
  CheckAccumulator slopes("boundary_slopes_nonpositive", cfg.slope_tol, true);
  CheckAccumulator slopes_fd("boundary_slopes_finite_difference", cfg.slope_fd_tol, true);
  CheckAccumulator restricted("restricted_form_agreement", 1e-12, true);
  CheckAccumulator gradient("mu_gradient", cfg.gradient_tol, true);
  CheckAccumulator exchange("coherence_exchange_monotone", -cfg.exchange_tol, false);

  CertifyReport rep;
  const std::vector<std::pair<double, double>> interior_points{{0.2, 0.3}, {0.1, 0.6}, {0.45, 0.45}};
  std::vector<ObjectiveContext> contexts;

  for (const CertifyContext& c : lattice) {
    const LambdaSystem sys(c.gamma1, c.gamma2);
    const Spectrum s = Spectrum::from_sorted(c.lambda, 1e-12);
    ObjectiveContext ctx = lambda_context(s, c.tau, sys);
    ++rep.contexts;
    if (c.tau <= c.tau_star) {
      ++rep.pre_equalization_contexts;
    } else {
      ++rep.equalized_contexts;
    }

    ordering.add(std::min(ctx.mu[0] - ctx.mu[1], ctx.mu[1] - ctx.mu[2]));

    ObjectiveContext probe = ctx;
    if (cfg.swap_mu) probe.mu = ctx.mu.reverse().eval();
    const ArgmaxResult best = argmax_F(probe, candidates, cfg.argmax.tie_tol);
    argmax.add(best.report.violation_margin);
    if (!best.report.winner_is_identity) argmax.fail();

    ObjectiveContext ones = ctx;
    ones.mu = Vec::Ones(3);
    for (std::size_t k = 0; k < candidates.candidates().size(); k += 17) {
      gauge.add(std::abs(F(candidates.candidates()[k].theta, ones)));
    }

    const HessianReport h = hessian_G(ctx);
    hess_id.add(h.identity_residual);
    for (const auto& [x, y] : interior_points) {
      const Eigen::Matrix2d fd = hessian_finite_difference(ctx, x, y);
      hess_fd.add((fd - h.g).cwiseAbs().maxCoeff());
      restricted.add(std::abs(F_restricted(x, y, ctx) - F(embed_restricted(x, y), ctx)));
    }

    const auto [s21, s23] = boundary_slopes(ctx);
    slopes.add(std::max(s21, s23));
    const auto [f21, f23] = boundary_slopes_finite_difference(ctx);
    slopes_fd.add(std::max(std::abs(f21 - s21), std::abs(f23 - s23)));

    // The finite-difference stencil must stay inside one regime and inside
    // the ordered simplex.
    const double gap = std::min({c.lambda[0] - c.lambda[1], c.lambda[1] - c.lambda[2], c.lambda[2]});
    if (gap > 1e-3 && std::abs(c.tau - c.tau_star) > 1e-3) {
      gradient.add(mu_gradient_check(s, c.tau, sys).max_deviation);
    }
    contexts.push_back(std::move(ctx));
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, contexts.size() - 1);
  for (int k = 0; k < cfg.exchange_samples; ++k) {
    RMatrix t = (k % 2 == 0 ? random_unistochastic(3, rng) : random_birkhoff(3, rng, 3)).matrix();
    if (t(0, 2) > t(2, 0)) t.transposeInPlace();
    const ObjectiveContext& ctx = contexts[pick(rng)];
    const CoherenceExchangeReport r = coherence_exchange_check(ctx, DoublyStochastic::make(t));
    exchange.add(std::min(r.f_after_first - r.f_before, r.f_after_second - r.f_after_first));
  }

  for (const auto* acc : {&argmax, &gauge, &ordering, &hess_id, &hess_fd, &slopes, &slopes_fd,
                          &restricted, &gradient, &exchange}) {
    rep.checks.push_back(acc->result());
  }
  return rep;
}

}  // namespace dcool
