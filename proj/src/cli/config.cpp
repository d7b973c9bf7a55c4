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

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dcool/cli.hpp"

namespace dcool::cli {

using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& v, const std::string& key, const std::string& origin) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": field '" + key + "': " + e.what());
  }
}

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
#define DCOOL_FIELD(name, type) \
  t[#name] = [](RunConfig& c, const json& v, const std::string& o) { c.name = get_field<type>(v, #name, o); }
    DCOOL_FIELD(gamma1, double);
    DCOOL_FIELD(gamma2, double);
    DCOOL_FIELD(lambda0, std::vector<double>);
    DCOOL_FIELD(horizon, double);
    DCOOL_FIELD(seed, std::uint64_t);
    DCOOL_FIELD(out, std::string);
    DCOOL_FIELD(policy, std::string);
    DCOOL_FIELD(schedule, std::string);
    DCOOL_FIELD(model, std::string);
    DCOOL_FIELD(stride, int);
    DCOOL_FIELD(grid_m, int);
    DCOOL_FIELD(n_t, int);
    DCOOL_FIELD(dp_bound, double);
    DCOOL_FIELD(dp_haar, int);
    DCOOL_FIELD(dp_triangle, int);
    DCOOL_FIELD(table_slices, int);
    DCOOL_FIELD(n_haar, int);
    DCOOL_FIELD(n_birkhoff, int);
    DCOOL_FIELD(exchange_samples, int);
    DCOOL_FIELD(lambda_resolution, int);
    DCOOL_FIELD(swap_mu, bool);
    DCOOL_FIELD(samples, int);
    DCOOL_FIELD(dim, int);
    DCOOL_FIELD(rate_preset, std::string);
    DCOOL_FIELD(perturbation_samples, int);
#undef DCOOL_FIELD
    t["dt"] = [](RunConfig& c, const json& v, const std::string& o) {
      if (v.is_null()) {
        c.dt.reset();
      } else {
        c.dt = get_field<double>(v, "dt", o);
      }
    };
    t["rates"] = [](RunConfig& c, const json& v, const std::string& o) {
      if (v.is_null()) {
        c.rates.reset();
        return;
      }
      const auto rows = get_field<std::vector<std::vector<double>>>(v, "rates", o);
      const auto n = static_cast<Index>(rows.size());
      RMatrix g(n, n);
      for (Index i = 0; i < n; ++i) {
        if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
          throw ConfigError(o + ": field 'rates': row " + std::to_string(i) + " has wrong length");
        }
        for (Index j = 0; j < n; ++j) g(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      c.rates = g;
    };
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(origin + ": unknown field '" + key + "'");
    it->second(cfg, value, origin);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

json to_json(const RunConfig& c) {
  json j;
  j["gamma1"] = c.gamma1;
  j["gamma2"] = c.gamma2;
  if (c.rates) {
    json rows = json::array();
    for (Index i = 0; i < c.rates->rows(); ++i) {
      json row = json::array();
      for (Index k = 0; k < c.rates->cols(); ++k) row.push_back((*c.rates)(i, k));
      rows.push_back(row);
    }
    j["rates"] = rows;
  } else {
    j["rates"] = nullptr;
  }
  j["lambda0"] = c.lambda0;
  j["horizon"] = c.horizon;
  j["dt"] = c.dt ? json(*c.dt) : json(nullptr);
  j["seed"] = c.seed;
  j["policy"] = c.policy;
  j["schedule"] = c.schedule;
  j["model"] = c.model;
  j["stride"] = c.stride;
  j["grid_m"] = c.grid_m;
  j["n_t"] = c.n_t;
  j["dp_bound"] = c.dp_bound;
  j["dp_haar"] = c.dp_haar;
  j["dp_triangle"] = c.dp_triangle;
  j["table_slices"] = c.table_slices;
  j["n_haar"] = c.n_haar;
  j["n_birkhoff"] = c.n_birkhoff;
  j["exchange_samples"] = c.exchange_samples;
  j["lambda_resolution"] = c.lambda_resolution;
  j["swap_mu"] = c.swap_mu;
  j["samples"] = c.samples;
  j["dim"] = c.dim;
  j["rate_preset"] = c.rate_preset;
  j["perturbation_samples"] = c.perturbation_samples;
  // `out` is deliberately absent: where results go does not change them.
  return j;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigError("field '" + field + "': " + msg);
  };
  require(c.gamma1 > 0.0 && std::isfinite(c.gamma1), "gamma1", "must be positive");
  require(c.gamma2 > 0.0 && std::isfinite(c.gamma2), "gamma2", "must be positive");
  require(c.horizon >= 0.0 && std::isfinite(c.horizon), "horizon", "must be >= 0");
  require(!c.dt || (*c.dt > 0.0 && std::isfinite(*c.dt)), "dt", "must be positive");
  require(c.stride > 0, "stride", "must be positive");
  require(c.grid_m >= 10, "grid_m", "must be >= 10");
  require(c.n_t >= 100, "n_t", "must be >= 100");
  require(c.dp_bound > 0.0, "dp_bound", "must be positive");
  require(c.dp_haar >= 0, "dp_haar", "must be >= 0");
  require(c.dp_triangle >= 0, "dp_triangle", "must be >= 0");
  require(c.table_slices >= 2, "table_slices", "must be >= 2");
  require(c.n_haar >= 0 && c.n_birkhoff >= 0, "n_haar/n_birkhoff", "must be >= 0");
  require(c.exchange_samples >= 0, "exchange_samples", "must be >= 0");
  require(c.lambda_resolution >= 2, "lambda_resolution", "must be >= 2");
  require(c.samples > 0, "samples", "must be positive");
  require(c.perturbation_samples >= 0, "perturbation_samples", "must be >= 0");
  require(c.dim >= 2 && c.dim <= 8, "dim", "must be in [2, 8]");
  require(c.policy == "greedy" || c.policy == "identity" || c.policy == "schedule", "policy",
          "must be greedy, identity or schedule");
  require(c.policy != "schedule" || !c.schedule.empty(), "schedule", "required for policy=schedule");
  require(c.model == "spectral" || c.model == "lindblad", "model", "must be spectral or lindblad");
  require(c.rate_preset == "lambda" || c.rate_preset == "random" || c.rate_preset == "two_excited" ||
              c.rate_preset == "zero",
          "rate_preset", "must be lambda, random, two_excited or zero");
  require(!c.lambda0.empty(), "lambda0", "must not be empty");
  double sum = 0.0;
  for (double v : c.lambda0) {
    require(v >= 0.0 && std::isfinite(v), "lambda0", "entries must be nonnegative");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "lambda0", "entries must sum to 1");
  const auto n = c.rates ? static_cast<std::size_t>(c.rates->rows()) : std::size_t{3};
  require(c.lambda0.size() == n, "lambda0", "length must match the number of levels");
}

}  // namespace dcool::cli
