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

#include "dcool/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace dcool {

ObjectiveContext lambda_context(const Spectrum& lambda, double tau, const LambdaSystem& sys) {
  const auto m = mu(lambda, tau, sys);
  return {Vec{{m[0], m[1], m[2]}}, lambda.values(), sys.generator()};
}

Vec gauge_mu2_zero(const Vec& mu) {
  if (mu.size() < 2) throw Error(ErrorCode::DimensionMismatch, "mu needs at least two entries");
  return (mu.array() - mu[1]).matrix();
}

namespace {

void check_context(const ObjectiveContext& ctx) {
  const Index n = ctx.gen.dim();
  if (ctx.mu.size() != n || ctx.lambda.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "mu, lambda and generator dimensions differ");
  }
}

// Decay rates of the Lambda structure: only level 2 decays, into 1 and 3.
std::pair<double, double> lambda_rates(const ObjectiveContext& ctx) {
  check_context(ctx);
  const RMatrix& b = ctx.gen.b;
  if (b.rows() != 3) throw Error(ErrorCode::DimensionMismatch, "reduced form needs N = 3");
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      const bool allowed = (j == 1) && (i != 1);
      if (!allowed && b(i, j) != 0.0) {
        throw Error(ErrorCode::InvalidArgument, "generator is not of Lambda form");
      }
    }
  }
  return {b(0, 1), b(2, 1)};
}

}  // namespace

double F(const DoublyStochastic& theta, const ObjectiveContext& ctx) {
  check_context(ctx);
  if (theta.dim() != ctx.gen.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "theta and context dimensions differ");
  }
  return ctx.mu.dot(spectral_matrix(theta, ctx.gen) * ctx.lambda);
}

std::string to_string(CandidateFamily f) {
  switch (f) {
    case CandidateFamily::Permutation: return "permutation";
    case CandidateFamily::Haar: return "haar";
    case CandidateFamily::Birkhoff: return "birkhoff";
    case CandidateFamily::TriangleGrid: return "triangle_grid";
  }
  return "unknown";
}

namespace {

std::vector<DoublyStochastic> triangle_grid(int points_per_edge) {
  std::vector<DoublyStochastic> out;
  const int g = points_per_edge - 1;
  for (int i = 0; i <= g; ++i) {
    for (int j = 0; i + j <= g; ++j) {
      out.push_back(embed_restricted(static_cast<double>(i) / g, static_cast<double>(j) / g));
    }
  }
  return out;
}

}  // namespace

CandidateSet::CandidateSet(Index n, const ArgmaxConfig& cfg) : n_(n) {
  for (auto& p : permutation_matrices(n)) candidates_.push_back({CandidateFamily::Permutation, p});
  std::mt19937_64 rng(cfg.seed);
  for (int k = 0; k < cfg.n_haar; ++k) {
    candidates_.push_back({CandidateFamily::Haar, random_unistochastic(n, rng)});
  }
  const int terms = cfg.birkhoff_terms > 0 ? cfg.birkhoff_terms : static_cast<int>(n);
  for (int k = 0; k < cfg.n_birkhoff; ++k) {
    candidates_.push_back({CandidateFamily::Birkhoff, random_birkhoff(n, rng, terms)});
  }
  if (n == 3 && cfg.triangle_grid > 1) {
    for (auto& t : triangle_grid(cfg.triangle_grid)) {
      candidates_.push_back({CandidateFamily::TriangleGrid, t});
    }
  }
}

ArgmaxResult argmax_F(const ObjectiveContext& ctx, const CandidateSet& set, double tie_tol,
                      simd::Backend backend) {
  check_context(ctx);
  const Index n = ctx.gen.dim();
  if (set.dim() != n) throw Error(ErrorCode::DimensionMismatch, "candidate set dimension");
  const auto& cands = set.candidates();

  simd::MatrixBank bank(static_cast<int>(n));
  for (const Candidate& c : cands) bank.push_back(spectral_matrix(c.theta, ctx.gen));
  std::vector<double> weights(static_cast<std::size_t>(n * n));
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) weights[static_cast<std::size_t>(r * n + c)] = ctx.mu[r] * ctx.lambda[c];
  std::vector<double> values(cands.size());
  simd::bilinear_forms(backend, bank, weights, values);

  ArgmaxReport rep;
  rep.f_identity = values[0];
  const double best = *std::max_element(values.begin(), values.end());
  rep.violation_margin = best - rep.f_identity;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] >= best - tie_tol) rep.ties.push_back(k);
  }
  rep.winner = rep.ties.front();
  rep.winner_is_identity = rep.winner == 0;

  for (CandidateFamily fam : {CandidateFamily::Permutation, CandidateFamily::Haar,
                              CandidateFamily::Birkhoff, CandidateFamily::TriangleGrid}) {
    FamilySummary s{fam, 0, -INFINITY, {}};
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (cands[k].family != fam) continue;
      ++s.count;
      s.top.push_back(values[k]);
    }
    if (s.count == 0) continue;
    std::sort(s.top.begin(), s.top.end(), std::greater<>());
    if (s.top.size() > 5) s.top.resize(5);
    s.best = s.top.front();
    rep.families.push_back(std::move(s));
  }
  return {cands[rep.winner].theta, values[rep.winner], std::move(rep)};
}

ArgmaxResult argmax_F(const ObjectiveContext& ctx, const ArgmaxConfig& cfg) {
  return argmax_F(ctx, CandidateSet(ctx.gen.dim(), cfg), cfg.tie_tol);
}

DoublyStochastic embed_restricted(double theta21, double theta23) {
  RMatrix t(3, 3);
  t << 1.0 - theta21, theta21, 0.0,
       theta21, 1.0 - theta21 - theta23, theta23,
       0.0, theta23, 1.0 - theta23;
  return DoublyStochastic::make(t);
}

double F_restricted(double theta21, double theta23, const ObjectiveContext& ctx) {
  constexpr double kTol = 1e-12;
  if (theta21 < -kTol || theta23 < -kTol || theta21 + theta23 > 1.0 + kTol) {
    throw Error(ErrorCode::DomainViolation, "(theta21, theta23) outside the triangle");
  }
  const auto [g1, g2] = lambda_rates(ctx);
  const Vec m = gauge_mu2_zero(ctx.mu);
  const Vec& l = ctx.lambda;
  const double gain = g1 * m[0] * (1.0 - theta21) + g2 * m[2] * (1.0 - theta23);
  const double excited = l[1] + theta21 * (l[0] - l[1]) + theta23 * (l[2] - l[1]);
  return gain * excited - (g1 + g2) * (m[0] * theta21 * l[0] + m[2] * theta23 * l[2]);
}

HessianReport hessian_G(const ObjectiveContext& ctx) {
  const auto [g1, g2] = lambda_rates(ctx);
  const Vec m = gauge_mu2_zero(ctx.mu);
  const Vec& l = ctx.lambda;
  HessianReport r{};
  r.g(0, 0) = -2.0 * (l[0] - l[1]) * m[0] * g1;
  r.g(1, 1) = -2.0 * (l[2] - l[1]) * m[2] * g2;
  r.g(0, 1) = r.g(1, 0) = -m[0] * (l[2] - l[1]) * g1 - m[2] * (l[0] - l[1]) * g2;
  r.a = g1 * m[0] * (l[2] - l[1]);
  r.b = g2 * m[2] * (l[0] - l[1]);
  r.det = r.g.determinant();
  r.identity_residual = std::abs(r.det + (r.a - r.b) * (r.a - r.b));
  return r;
}

Eigen::Matrix2d hessian_finite_difference(const ObjectiveContext& ctx, double theta21,
                                          double theta23, double step) {
  auto f = [&](double x, double y) { return F(embed_restricted(x, y), ctx); };
  const double h = step;
  Eigen::Matrix2d g;
  const double f0 = f(theta21, theta23);
  g(0, 0) = (f(theta21 + h, theta23) - 2.0 * f0 + f(theta21 - h, theta23)) / (h * h);
  g(1, 1) = (f(theta21, theta23 + h) - 2.0 * f0 + f(theta21, theta23 - h)) / (h * h);
  g(0, 1) = g(1, 0) = (f(theta21 + h, theta23 + h) - f(theta21 + h, theta23 - h) -
                       f(theta21 - h, theta23 + h) + f(theta21 - h, theta23 - h)) /
                      (4.0 * h * h);
  return g;
}

std::pair<double, double> boundary_slopes(const ObjectiveContext& ctx) {
  const auto [g1, g2] = lambda_rates(ctx);
  const Vec m = gauge_mu2_zero(ctx.mu);
  const Vec& l = ctx.lambda;
  const double gain = m[2] * g2 + m[0] * g1;
  const double d21 = (l[0] - l[1]) * gain + l[1] * (-m[0] * g1) - (g1 + g2) * m[0] * l[0];
  const double d23 = (l[2] - l[1]) * gain + l[1] * (-m[2] * g2) - (g1 + g2) * m[2] * l[2];
  return {d21, d23};
}

std::pair<double, double> boundary_slopes_finite_difference(const ObjectiveContext& ctx,
                                                            double step) {
  const double h = step;
  const double f0 = F_restricted(0.0, 0.0, ctx);
  const double dx = (-3.0 * f0 + 4.0 * F_restricted(h, 0.0, ctx) - F_restricted(2.0 * h, 0.0, ctx)) / (2.0 * h);
  const double dy = (-3.0 * f0 + 4.0 * F_restricted(0.0, h, ctx) - F_restricted(0.0, 2.0 * h, ctx)) / (2.0 * h);
  return {dx, dy};
}

CoherenceExchangeReport coherence_exchange_check(const ObjectiveContext& ctx,
                                                 const DoublyStochastic& theta, double tol) {
  lambda_rates(ctx);
  if (theta.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "exchange moves need N = 3");
  RMatrix t = theta.matrix();
  if (t(0, 2) > t(2, 0)) {
    throw Error(ErrorCode::DomainViolation, "exchange moves assume theta31 >= theta13",
                t(0, 2) - t(2, 0));
  }
  auto checked = [](const RMatrix& m) {
    if (m.minCoeff() < -1e-12 || m.maxCoeff() > 1.0 + 1e-12) {
      throw Error(ErrorCode::DomainViolation, "exchange move left [0,1]");
    }
    return DoublyStochastic::make(m);
  };

  CoherenceExchangeReport r;
  r.f_before = F(theta, ctx);

  const double delta = t(0, 2);
  t(0, 0) += delta;
  t(2, 2) += delta;
  t(0, 2) -= delta;
  t(2, 0) -= delta;
  r.theta_after_first = t;
  r.f_after_first = F(checked(t), ctx);

  const double delta1 = t(2, 0);
  t(0, 0) += delta1;
  t(2, 1) += delta1;
  t(2, 0) -= delta1;
  t(0, 1) -= delta1;
  r.theta_after_second = t;
  r.f_after_second = F(checked(t), ctx);

  r.nondecreasing = r.f_after_first >= r.f_before - tol && r.f_after_second >= r.f_after_first - tol;
  return r;
}

// ---------------------------------------------------------------------------

SimplexGrid::SimplexGrid(int m) : m_(m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 1");
  const auto stride = static_cast<std::size_t>(m + 1);
  std::vector<std::int32_t> ordered(stride * stride, -1);
  for (int a = m; a >= 0; --a) {
    for (int b = std::min(a, m - a); b >= 0; --b) {
      const int c = m - a - b;
      if (c > b) break;
      ordered[static_cast<std::size_t>(a) * stride + static_cast<std::size_t>(b)] =
          static_cast<std::int32_t>(points_.size());
      points_.push_back({a, b, c});
    }
  }
  index_.assign(stride * stride, 0);
  for (int a = 0; a <= m; ++a) {
    for (int b = 0; a + b <= m; ++b) {
      std::array<int, 3> p{a, b, m - a - b};
      std::sort(p.begin(), p.end(), std::greater<>());
      index_[static_cast<std::size_t>(a) * stride + static_cast<std::size_t>(b)] =
          ordered[static_cast<std::size_t>(p[0]) * stride + static_cast<std::size_t>(p[1])];
    }
  }
}

Vec SimplexGrid::lambda(std::size_t i) const {
  const auto& p = points_[i];
  const double m = m_;
  return Vec{{p[0] / m, p[1] / m, p[2] / m}};
}

std::int32_t SimplexGrid::index_of(int a, int b) const {
  if (a < 0 || b < 0 || a + b > m_) throw Error(ErrorCode::DomainViolation, "lattice point outside simplex");
  return index_[static_cast<std::size_t>(a) * static_cast<std::size_t>(m_ + 1) + static_cast<std::size_t>(b)];
}

bool SimplexGrid::interior(std::size_t i) const {
  const auto& p = points_[i];
  return p[0] > p[1] && p[1] > p[2] && p[2] > 0;
}

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Permutation: return "permutation";
    case ActionKind::Haar: return "haar";
    case ActionKind::Triangle: return "triangle";
  }
  return "unknown";
}

std::vector<DpAction> dp_actions(const DpConfig& cfg) {
  std::vector<DpAction> out;
  if (cfg.permutations) {
    bool first = true;
    for (auto& p : permutation_matrices(3)) {
      out.push_back({ActionKind::Permutation, p, first});
      first = false;
    }
  } else {
    out.push_back({ActionKind::Permutation, DoublyStochastic::identity(3), true});
  }
  std::mt19937_64 rng(cfg.seed);
  for (int k = 0; k < cfg.n_haar; ++k) out.push_back({ActionKind::Haar, random_unistochastic(3, rng), false});
  if (cfg.triangle_grid > 1) {
    for (auto& t : triangle_grid(cfg.triangle_grid)) out.push_back({ActionKind::Triangle, t, false});
  }
  if (out.size() > 65535) throw Error(ErrorCode::InvalidArgument, "too many DP actions");
  return out;
}

double ValueTable::interpolate(const Vec& lambda, int k) const {
  simd::MatrixBank zero(3);
  zero.push_back(RMatrix::Zero(3, 3));
  const double l[3] = {lambda[0], lambda[1], lambda[2]};
  const simd::SimplexTable tab{grid.resolution(), grid.index_table().data(),
                               values[static_cast<std::size_t>(k)].data()};
  double out = 0.0;
  simd::step_and_interpolate(simd::Backend::Scalar, zero, l, 0.0, 1e-9, tab, {&out, 1});
  return out;
}

ValueTable dp_solve(const LambdaSystem& sys, const DpConfig& cfg, simd::Backend backend) {
  if (cfg.m < 10) throw Error(ErrorCode::InvalidArgument, "dp grid resolution must be >= 10");
  if (cfg.n_t < 100) throw Error(ErrorCode::InvalidArgument, "dp needs at least 100 time steps");
  if (!(cfg.horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "dp horizon must be positive");

  ValueTable vt{SimplexGrid(cfg.m), cfg.horizon / cfg.n_t, {}, {}, {}, dp_actions(cfg)};
  const auto n_t = static_cast<std::size_t>(cfg.n_t);
  const std::size_t npts = vt.grid.size();
  vt.times.resize(n_t + 1);
  for (std::size_t k = 0; k <= n_t; ++k) vt.times[k] = static_cast<double>(k) * vt.dt;
  vt.times[n_t] = cfg.horizon;
  vt.values.assign(n_t + 1, std::vector<double>(npts));
  vt.policy.assign(n_t, std::vector<std::uint16_t>(npts));

  const SpectralGenerator gen = sys.generator();
  simd::MatrixBank bank(3);
  for (const DpAction& a : vt.actions) bank.push_back(spectral_matrix(a.theta, gen));

  for (std::size_t i = 0; i < npts; ++i) vt.values[n_t][i] = vt.grid.lambda(i)[0];

  std::vector<double> scores(vt.actions.size());
  for (std::size_t k = n_t; k-- > 0;) {
    const simd::SimplexTable tab{cfg.m, vt.grid.index_table().data(), vt.values[k + 1].data()};
    auto& vals = vt.values[k];
    auto& pol = vt.policy[k];
    for (std::size_t i = 0; i < npts; ++i) {
      const Vec l = vt.grid.lambda(i);
      const double lam[3] = {l[0], l[1], l[2]};
      if (!simd::step_and_interpolate(backend, bank, lam, vt.dt, cfg.clip_tol, tab, scores)) {
        throw Error(ErrorCode::GridUnderflow,
                    "propagated point left the simplex at t=" + std::to_string(vt.times[k]),
                    vt.times[k]);
      }
      const double best = *std::max_element(scores.begin(), scores.end());
      std::size_t chosen = 0;
      while (scores[chosen] < best - cfg.tie_tol) ++chosen;
      vals[i] = best;
      pol[i] = static_cast<std::uint16_t>(chosen);
    }
  }
  return vt;
}

DpComparison compare_with_analytic(const ValueTable& table, const LambdaSystem& sys) {
  DpComparison c;
  const double horizon = table.horizon();
  double sum = 0.0;
  std::size_t cells = 0;
  std::size_t perm_cells = 0;
  std::size_t id_cells = 0;
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    if (!table.grid.interior(i)) continue;
    const Spectrum s = Spectrum::from_sorted(table.grid.lambda(i), 1e-12);
    const double dev = std::abs(table.values[0][i] - return_function(s, horizon, sys));
    c.max_deviation = std::max(c.max_deviation, dev);
    sum += dev;
    ++c.interior_points;
    for (const auto& slice : table.policy) {
      const DpAction& a = table.actions[slice[i]];
      perm_cells += a.kind == ActionKind::Permutation ? 1 : 0;
      id_cells += a.identity ? 1 : 0;
      ++cells;
    }
  }
  if (c.interior_points > 0) c.mean_deviation = sum / static_cast<double>(c.interior_points);
  if (cells > 0) {
    c.permutation_policy_fraction = static_cast<double>(perm_cells) / static_cast<double>(cells);
    c.identity_policy_fraction = static_cast<double>(id_cells) / static_cast<double>(cells);
  }
  return c;
}

}  // namespace dcool
