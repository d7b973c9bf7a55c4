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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dcool/certify.hpp"
#include "dcool/cli.hpp"
#include "dcool/equivalence.hpp"
#include "dcool/error.hpp"
#include "dcool/hjb.hpp"
#include "dcool/lambda3.hpp"
#include "dcool/lindblad.hpp"
#include "dcool/spectral.hpp"

namespace dcool::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  const fs::path path = fs::path(cfg.out) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::ofstream open_csv(const RunConfig& cfg, const std::string& name, const std::string& header) {
  auto out = open_output(cfg, name);
  out << "# dcool " << tool_version() << " config_hash=" << config_hash(cfg) << '\n' << header << '\n';
  return out;
}

json report_header(const RunConfig& cfg, const std::string& command) {
  json j;
  j["tool"] = "dcool";
  j["version"] = tool_version();
  j["config_hash"] = config_hash(cfg);
  j["command"] = command;
  j["config"] = to_json(cfg);
  return j;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& doc) {
  auto out = open_output(cfg, name);
  out << doc.dump(2) << '\n';
}

RateMatrix system_rates(const RunConfig& cfg) {
  if (cfg.rates) return RateMatrix(*cfg.rates);
  return RateMatrix::lambda_system(cfg.gamma1, cfg.gamma2);
}

LambdaSystem lambda_system(const RunConfig& cfg) {
  if (cfg.rates) throw ConfigError("this command needs the Lambda system (gamma1, gamma2), not a rate matrix");
  if (cfg.gamma1 < cfg.gamma2) throw ConfigError("field 'gamma1': must be >= gamma2");
  return LambdaSystem(cfg.gamma1, cfg.gamma2);
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

// Schedule files hold {"segments": [{"until": t, "theta": [[...], ...]}, ...]}; the
// last segment extends to the horizon.
SpectralPolicy schedule_policy(const std::string& path, Index n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schedule file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!doc.contains("segments") || !doc["segments"].is_array() || doc["segments"].empty()) {
    throw ConfigError(path + ": field 'segments': expected a non-empty array");
  }
  struct Segment {
    double until;
    DoublyStochastic theta;
  };
  std::vector<Segment> segs;
  for (std::size_t s = 0; s < doc["segments"].size(); ++s) {
    const json& seg = doc["segments"][s];
    const std::string where = path + ": segments[" + std::to_string(s) + "]";
    std::vector<std::vector<double>> rows;
    double until = 0.0;
    try {
      rows = seg.at("theta").get<std::vector<std::vector<double>>>();
      until = seg.at("until").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (static_cast<Index>(rows.size()) != n) throw ConfigError(where + ": theta has wrong size");
    RMatrix t(n, n);
    for (Index i = 0; i < n; ++i) {
      if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
        throw ConfigError(where + ": theta has wrong size");
      }
      for (Index j = 0; j < n; ++j) t(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    try {
      segs.push_back({until, DoublyStochastic::make(t, 1e-9)});
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  SpectralPolicy p;
  p.name = "schedule";
  p.choose = [segs](const Vec&, double t) {
    for (const auto& s : segs) {
      if (t < s.until) return s.theta;
    }
    return segs.back().theta;
  };
  return p;
}

std::string regime_label(const Vec& state, double tau, const RunConfig& cfg) {
  if (cfg.rates || state.size() != 3) return "NA";
  try {
    const Spectrum s = Spectrum::from_unsorted(state, 1e-6);
    return std::string(to_string(regime(s, tau, lambda_system(cfg)).regime));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateInput) return "Degenerate";
    throw;
  }
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
  const RateMatrix rates = system_rates(cfg);
  const Index n = rates.dim();
  const Vec lambda0 = to_vec(cfg.lambda0);
  const double dt = cfg.dt ? *cfg.dt : default_dt(rates);
  if (!cfg.rates) lambda_system(cfg);

  std::vector<double> times;
  std::vector<Vec> states;
  json invariants;
  std::optional<double> crossing;

  if (cfg.model == "lindblad") {
    if (cfg.policy != "identity") throw ConfigError("field 'policy': the lindblad model supports only identity");
    PropagateOptions opts;
    opts.stride = static_cast<std::size_t>(cfg.stride);
    const auto traj = propagate(DensityMatrix::diagonal(lambda0), rates, {}, cfg.horizon, dt, opts);
    times = traj.times;
    for (const auto& rho : traj.states) states.push_back(rho.matrix().diagonal().real());
    invariants["max_trace_drift"] = traj.max_trace_drift;
    invariants["min_eigenvalue"] = traj.min_eigenvalue;
    invariants["max_hermiticity_error"] = traj.max_hermiticity_error;
  } else {
    const SpectralGenerator gen = build_generator(rates);
    SpectralPolicy policy = cfg.policy == "greedy"     ? greedy_policy()
                            : cfg.policy == "identity" ? identity_policy(n)
                                                       : schedule_policy(cfg.schedule, n);
    if (cfg.policy == "greedy" && n != 3) {
      policy = identity_policy(n);
      policy.order_maintaining = true;
      policy.name = "greedy";
    }
    SpectralPropagateOptions opts;
    opts.stride = static_cast<std::size_t>(cfg.stride);
    const auto traj = spectral_propagate(lambda0, policy, gen, cfg.horizon, dt, opts);
    times = traj.times;
    states = traj.states;
    crossing = traj.first_reorder_time;
    invariants["max_sum_drift"] = traj.max_sum_drift;
    invariants["min_component"] = traj.min_component;
  }

  std::string header = "t";
  for (Index i = 0; i < n; ++i) header += ",lambda" + std::to_string(i + 1);
  header += ",purity,regime";
  auto csv = open_csv(cfg, "trajectory.csv", header);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Vec& s = states[k];
    csv << format_number(times[k]);
    for (Index i = 0; i < n; ++i) csv << ',' << format_number(s[i]);
    csv << ',' << format_number(s.maxCoeff()) << ',' << regime_label(s, cfg.horizon - times[k], cfg) << '\n';
  }

  json manifest = report_header(cfg, "simulate");
  manifest["invariants"] = invariants;
  manifest["samples"] = times.size();
  const Vec& last = states.back();
  manifest["final"] = {{"t", times.back()}, {"spectrum", to_std(last)}, {"purity", last.maxCoeff()}};
  if (!cfg.rates && cfg.policy == "greedy") {
    const LambdaSystem sys = lambda_system(cfg);
    const Spectrum s0 = Spectrum::from_unsorted(lambda0, 1e-9);
    json analytic;
    const double v = return_function(s0, cfg.horizon, sys);
    analytic["return_function"] = v;
    analytic["deviation"] = std::abs(v - last.maxCoeff());
    if (s0.values()[1] > 0.0) analytic["tau_star"] = tau_star(s0, sys);
    analytic["simulated_crossing"] = crossing ? json(*crossing) : json(nullptr);
    manifest["analytic"] = analytic;
  }
  write_json(cfg, "manifest.json", manifest);
  return kSuccess;
}

int cmd_certify(const RunConfig& cfg) {
  lambda_system(cfg);
  CertifyConfig cc;
  cc.systems = {{cfg.gamma1, cfg.gamma2}};
  cc.lambda_resolution = cfg.lambda_resolution;
  cc.argmax.n_haar = cfg.n_haar;
  cc.argmax.n_birkhoff = cfg.n_birkhoff;
  cc.argmax.seed = cfg.seed;
  cc.exchange_samples = cfg.exchange_samples;
  cc.swap_mu = cfg.swap_mu;
  cc.seed = cfg.seed;
  const CertifyReport rep = run_certification(cc);

  json doc = report_header(cfg, "certify");
  doc["contexts"] = rep.contexts;
  doc["pre_equalization_contexts"] = rep.pre_equalization_contexts;
  doc["equalized_contexts"] = rep.equalized_contexts;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"worst", c.worst},
                      {"threshold", c.threshold}, {"count", c.count}});
  }
  doc["checks"] = checks;
  doc["all_passed"] = rep.all_passed();
  write_json(cfg, "certify.json", doc);
  return rep.all_passed() ? kSuccess : kToleranceFailure;
}

int cmd_dp(const RunConfig& cfg) {
  const LambdaSystem sys = lambda_system(cfg);
  DpConfig dc;
  dc.horizon = cfg.horizon;
  dc.n_t = cfg.n_t;
  dc.m = cfg.grid_m;
  dc.n_haar = cfg.dp_haar;
  dc.triangle_grid = cfg.dp_triangle;
  dc.seed = cfg.seed;
  const ValueTable vt = dp_solve(sys, dc);
  const DpComparison cmp = compare_with_analytic(vt, sys);

  const int n_t = vt.n_t();
  std::vector<int> slices;
  for (int s = 0; s < cfg.table_slices; ++s) {
    const int k = static_cast<int>(std::lround(static_cast<double>(s) * n_t / (cfg.table_slices - 1)));
    if (slices.empty() || slices.back() != k) slices.push_back(k);
  }

  auto values = open_csv(cfg, "value_table.csv", "lambda1,lambda2,lambda3,tau,V");
  auto policy = open_csv(cfg, "policy.csv", "lambda1,lambda2,lambda3,tau,action,kind,identity");
  double terminal_error = 0.0;
  for (std::size_t i = 0; i < vt.grid.size(); ++i) {
    terminal_error = std::max(terminal_error, std::abs(vt.values[static_cast<std::size_t>(n_t)][i] -
                                                       vt.grid.lambda(i)[0]));
  }
  for (int k : slices) {
    const double tau = vt.horizon() - vt.times[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < vt.grid.size(); ++i) {
      const Vec l = vt.grid.lambda(i);
      const std::string coords =
          format_number(l[0]) + ',' + format_number(l[1]) + ',' + format_number(l[2]) + ',' + format_number(tau);
      values << coords << ',' << format_number(vt.values[static_cast<std::size_t>(k)][i]) << '\n';
      if (k < n_t) {
        const std::uint16_t a = vt.policy[static_cast<std::size_t>(k)][i];
        const DpAction& act = vt.actions[a];
        policy << coords << ',' << a << ',' << to_string(act.kind) << ',' << (act.identity ? 1 : 0) << '\n';
      }
    }
  }

  json doc = report_header(cfg, "dp");
  doc["grid_points"] = vt.grid.size();
  doc["interior_points"] = cmp.interior_points;
  doc["actions"] = vt.actions.size();
  doc["max_deviation"] = cmp.max_deviation;
  doc["mean_deviation"] = cmp.mean_deviation;
  doc["terminal_slice_error"] = terminal_error;
  doc["permutation_policy_fraction"] = cmp.permutation_policy_fraction;
  doc["identity_policy_fraction"] = cmp.identity_policy_fraction;
  doc["bound"] = cfg.dp_bound;
  const bool ok = cmp.max_deviation <= cfg.dp_bound;
  doc["passed"] = ok;
  write_json(cfg, "dp_report.json", doc);
  return ok ? kSuccess : kToleranceFailure;
}

int cmd_equiv(const RunConfig& cfg) {
  EquivalenceConfig ec;
  ec.dim = cfg.dim;
  ec.samples = cfg.samples;
  ec.rates = parse_rate_preset(cfg.rate_preset);
  ec.gamma1 = cfg.gamma1;
  ec.gamma2 = cfg.gamma2;
  ec.seed = cfg.seed;
  ec.perturbation_samples = cfg.perturbation_samples;
  const EquivalenceReport rep = run_equivalence(ec);

  json doc = report_header(cfg, "equiv");
  doc["samples"] = rep.samples;
  doc["max_algebraic_deviation"] = rep.max_algebraic_deviation;
  doc["algebraic_tolerance"] = ec.algebraic_tol;
  doc["perturbation_samples"] = rep.perturbation_samples;
  doc["exact_perturbation_samples"] = rep.exact_perturbation_samples;
  doc["min_ratio"] = rep.min_ratio;
  doc["max_ratio"] = rep.max_ratio;
  doc["ratio_bounds"] = {ec.ratio_lo, ec.ratio_hi};
  doc["algebraic_pass"] = rep.algebraic_pass;
  doc["perturbation_pass"] = rep.perturbation_pass;
  write_json(cfg, "equiv.json", doc);
  return rep.algebraic_pass && rep.perturbation_pass ? kSuccess : kToleranceFailure;
}

namespace {

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  double dt = 0.0;
  double horizon = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::vector<double> lambda0;
  std::string policy, schedule, model, rate_preset;
  int stride = 0, grid_m = 0, n_t = 0, dp_haar = 0, dp_triangle = 0, table_slices = 0;
  int n_haar = 0, n_birkhoff = 0, exchange_samples = 0, lambda_resolution = 0;
  int samples = 0, dim = 0, perturbation_samples = 0;
  double dp_bound = 0.0;
  bool swap_mu = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--dt", o.dt, "integration step");
  sub->add_option("--horizon", o.horizon, "horizon T");
  sub->add_option("--gamma1", o.gamma1, "decay rate 2 -> 1");
  sub->add_option("--gamma2", o.gamma2, "decay rate 2 -> 3");
  sub->add_option("--lambda0", o.lambda0, "initial spectrum a,b,c")->delimiter(',');
}

template <typename T>
void apply(const CLI::App* sub, const char* flag, const T& from, T& to) {
  if (sub->count(flag) > 0) to = from;
}

RunConfig resolve(const CLI::App* sub, const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  apply(sub, "--seed", o.seed, cfg.seed);
  apply(sub, "--out", o.out, cfg.out);
  if (sub->count("--dt") > 0) cfg.dt = o.dt;
  apply(sub, "--horizon", o.horizon, cfg.horizon);
  apply(sub, "--gamma1", o.gamma1, cfg.gamma1);
  apply(sub, "--gamma2", o.gamma2, cfg.gamma2);
  apply(sub, "--lambda0", o.lambda0, cfg.lambda0);
  for (const auto& [flag, from, to] : {std::tuple{"--policy", &o.policy, &cfg.policy},
                                       std::tuple{"--schedule", &o.schedule, &cfg.schedule},
                                       std::tuple{"--model", &o.model, &cfg.model},
                                       std::tuple{"--rates", &o.rate_preset, &cfg.rate_preset}}) {
    if (sub->get_option_no_throw(flag) != nullptr) apply(sub, flag, *from, *to);
  }
  for (const auto& [flag, from, to] :
       {std::tuple{"--stride", &o.stride, &cfg.stride}, std::tuple{"--grid-m", &o.grid_m, &cfg.grid_m},
        std::tuple{"--n-t", &o.n_t, &cfg.n_t}, std::tuple{"--dp-haar", &o.dp_haar, &cfg.dp_haar},
        std::tuple{"--dp-triangle", &o.dp_triangle, &cfg.dp_triangle},
        std::tuple{"--table-slices", &o.table_slices, &cfg.table_slices},
        std::tuple{"--n-haar", &o.n_haar, &cfg.n_haar}, std::tuple{"--n-birkhoff", &o.n_birkhoff, &cfg.n_birkhoff},
        std::tuple{"--exchange-samples", &o.exchange_samples, &cfg.exchange_samples},
        std::tuple{"--lambda-resolution", &o.lambda_resolution, &cfg.lambda_resolution},
        std::tuple{"--samples", &o.samples, &cfg.samples}, std::tuple{"--dim", &o.dim, &cfg.dim},
        std::tuple{"--perturbation-samples", &o.perturbation_samples, &cfg.perturbation_samples}}) {
    if (sub->get_option_no_throw(flag) != nullptr) apply(sub, flag, *from, *to);
  }
  if (sub->get_option_no_throw("--dp-bound") != nullptr) apply(sub, "--dp-bound", o.dp_bound, cfg.dp_bound);
  if (sub->get_option_no_throw("--swap-mu") != nullptr && sub->count("--swap-mu") > 0) cfg.swap_mu = true;
  validate(cfg);
  return cfg;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"dcool: optimal cooling of dissipative quantum systems"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  Overrides o;

  auto* sim = app.add_subcommand("simulate", "integrate a spectrum or density matrix trajectory");
  add_common(sim, o);
  sim->add_option("--policy", o.policy, "greedy | identity | schedule");
  sim->add_option("--schedule", o.schedule, "JSON theta schedule for policy=schedule");
  sim->add_option("--model", o.model, "spectral | lindblad");
  sim->add_option("--stride", o.stride, "output stride in steps");

  auto* cert = app.add_subcommand("certify", "numerically certify optimality of the ordered strategy");
  add_common(cert, o);
  cert->add_option("--n-haar", o.n_haar, "Haar samples per context");
  cert->add_option("--n-birkhoff", o.n_birkhoff, "Birkhoff samples per context");
  cert->add_option("--exchange-samples", o.exchange_samples, "coherence-exchange samples");
  cert->add_option("--lambda-resolution", o.lambda_resolution, "spectrum lattice resolution");
  cert->add_flag("--swap-mu", o.swap_mu, "reverse the co-state (negative control)");

  auto* dp = app.add_subcommand("dp", "solve the HJB equation by backward induction");
  add_common(dp, o);
  dp->add_option("--grid-m", o.grid_m, "simplex grid resolution");
  dp->add_option("--n-t", o.n_t, "time steps");
  dp->add_option("--dp-haar", o.dp_haar, "Haar actions");
  dp->add_option("--dp-triangle", o.dp_triangle, "triangle grid points per edge");
  dp->add_option("--table-slices", o.table_slices, "time slices written to the value table");
  dp->add_option("--dp-bound", o.dp_bound, "maximum allowed deviation from the analytic value");

  auto* eq = app.add_subcommand("equiv", "check the reduced spectral equation against the full one");
  add_common(eq, o);
  eq->add_option("--samples", o.samples, "random samples");
  eq->add_option("--dim", o.dim, "number of levels");
  eq->add_option("--rates", o.rate_preset, "lambda | random | two_excited | zero");
  eq->add_option("--perturbation-samples", o.perturbation_samples, "perturbation samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const RunConfig cfg = resolve(sub, o);
      const std::string name = sub->get_name();
      if (name == "simulate") return cmd_simulate(cfg);
      if (name == "certify") return cmd_certify(cfg);
      if (name == "dp") return cmd_dp(cfg);
      if (name == "equiv") return cmd_equiv(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::InvariantViolation:
      case ErrorCode::GridUnderflow:
        return kInvariantViolation;
      default:
        return kUsageError;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace dcool::cli
