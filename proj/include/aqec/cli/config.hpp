// Copyright 2026 The aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration: one JSON object per run, validated before anything
// executes. Unknown keys are errors at every level.

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aqec/classent.hpp"
#include "aqec/codes.hpp"
#include "aqec/error.hpp"
#include "aqec/noise.hpp"

namespace aqec::cli {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "kl-check",     "entropy-exact",  "entropy-mc",      "mld",         "replica",
      "threshold-scan", "imperfect-exact", "imperfect-mc", "bounds-suite"};
  return names;
}

struct CodeSpec {
  std::string family;  // repetition | toric | toric_qudit | five_qubit | custom
  std::vector<std::size_t> sizes;
  std::uint32_t d = 2;
  std::string file;                     // custom: path to a code text file
  std::vector<std::string> generators;  // custom: inline x|z rows

  bool operator==(const CodeSpec&) const = default;
};

struct NoiseSpec {
  std::string kind = "bit_flip";
  double p = 0.0;
  double pz = 0.0;
  std::optional<std::size_t> weight_cap;

  bool operator==(const NoiseSpec&) const = default;
};

struct RunConfig {
  std::string experiment;
  std::optional<CodeSpec> code;
  std::optional<NoiseSpec> noise;
  std::vector<double> p_grid;
  std::vector<double> beta_grid;
  std::vector<int> replicas;
  std::vector<std::size_t> lattice_sizes;
  std::string mode = "exact";
  std::uint64_t samples = 10000;
  std::uint64_t sweeps = 100000;
  std::uint64_t burn_in = 1000;
  std::size_t chains = 4;
  std::uint64_t seed = 1;
  std::string output = "aqec-out";
  std::size_t threads = 1;
  bool validation_mode = false;
  bool include_third_term = true;

  bool operator==(const RunConfig&) const = default;

  // Rates to scan: p_grid, or the single noise rate when the grid is empty.
  std::vector<double> rates() const {
    if (!p_grid.empty()) return p_grid;
    if (noise) return {noise->p};
    return {};
  }
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const Json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
  }
}

template <typename T>
void read_opt(const Json& obj, const std::string& key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

}  // namespace detail

inline CodeSpec parse_code_spec(const Json& j) {
  detail::reject_unknown(j, {"family", "sizes", "d", "file", "generators"}, "code");
  CodeSpec c;
  if (!j.contains("family")) throw ConfigError("code.family is required");
  c.family = detail::get_as<std::string>(j, "family", "code");
  detail::read_opt(j, "sizes", c.sizes, "code");
  detail::read_opt(j, "d", c.d, "code");
  detail::read_opt(j, "file", c.file, "code");
  detail::read_opt(j, "generators", c.generators, "code");
  static const std::set<std::string> families = {"repetition", "toric", "toric_qudit",
                                                 "five_qubit", "custom"};
  if (!families.contains(c.family)) throw ConfigError("unknown code family '" + c.family + "'");
  const bool sized = c.family == "repetition" || c.family == "toric" || c.family == "toric_qudit";
  if (sized && c.sizes.empty()) throw ConfigError("code.sizes is required for " + c.family);
  if (c.family == "custom" && c.file.empty() && c.generators.empty()) {
    throw ConfigError("custom code needs 'file' or 'generators'");
  }
  if (!is_prime(c.d)) throw ConfigError("code.d must be prime");
  return c;
}

inline NoiseSpec parse_noise_spec(const Json& j) {
  detail::reject_unknown(j, {"kind", "p", "pz", "weight_cap"}, "noise");
  NoiseSpec n;
  detail::read_opt(j, "kind", n.kind, "noise");
  detail::read_opt(j, "p", n.p, "noise");
  detail::read_opt(j, "pz", n.pz, "noise");
  if (j.contains("weight_cap")) n.weight_cap = detail::get_as<std::size_t>(j, "weight_cap", "noise");
  NoiseModel::parse_kind(n.kind);
  if (!(n.p >= 0.0 && n.p <= 1.0) || !(n.pz >= 0.0 && n.pz <= 1.0)) {
    throw ConfigError("noise rates must lie in [0, 1]");
  }
  return n;
}

inline void validate_config(const RunConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  }
  const bool imperfect = c.experiment.starts_with("imperfect");
  if (!imperfect) {
    if (!c.code) throw ConfigError(c.experiment + " needs a 'code' section");
    if (!c.noise) throw ConfigError(c.experiment + " needs a 'noise' section");
    if (c.rates().empty()) throw ConfigError("no error rates given");
  } else {
    if (c.lattice_sizes.empty()) throw ConfigError(c.experiment + " needs 'lattice_sizes'");
    if (c.beta_grid.empty()) throw ConfigError(c.experiment + " needs 'beta_grid'");
    if (c.p_grid.empty()) throw ConfigError(c.experiment + " needs 'p_grid'");
    for (double b : c.beta_grid) {
      if (!(b > 0.0)) throw ConfigError("beta values must be positive");
    }
    for (double p : c.p_grid) {
      if (!(p > 0.0 && p < 1.0)) throw ConfigError("imperfect runs need 0 < p < 1");
    }
  }
  for (double p : c.p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_grid values must lie in [0, 1]");
  }
  for (int R : c.replicas) {
    if (R < 2) throw ConfigError("replica counts must be >= 2");
  }
  if (c.experiment == "replica" && c.replicas.empty()) throw ConfigError("replica needs 'replicas'");
  if (c.mode != "exact" && c.mode != "mc") throw ConfigError("mode must be 'exact' or 'mc'");
  if (c.threads == 0) throw ConfigError("threads must be >= 1");
  if (c.chains == 0) throw ConfigError("chains must be >= 1");
}

inline RunConfig parse_config(const Json& j) {
  detail::reject_unknown(j, {"experiment", "code", "noise", "p_grid", "beta_grid", "replicas",
                             "lattice_sizes", "mode", "samples", "sweeps", "burn_in", "chains",
                             "seed", "output", "threads", "validation_mode",
                             "include_third_term"},
                         "config");
  RunConfig c;
  if (!j.contains("experiment")) throw ConfigError("'experiment' is required");
  c.experiment = detail::get_as<std::string>(j, "experiment", "config");
  if (j.contains("code")) c.code = parse_code_spec(j.at("code"));
  if (j.contains("noise")) c.noise = parse_noise_spec(j.at("noise"));
  detail::read_opt(j, "p_grid", c.p_grid, "config");
  detail::read_opt(j, "beta_grid", c.beta_grid, "config");
  detail::read_opt(j, "replicas", c.replicas, "config");
  detail::read_opt(j, "lattice_sizes", c.lattice_sizes, "config");
  detail::read_opt(j, "mode", c.mode, "config");
  detail::read_opt(j, "samples", c.samples, "config");
  detail::read_opt(j, "sweeps", c.sweeps, "config");
  detail::read_opt(j, "burn_in", c.burn_in, "config");
  detail::read_opt(j, "chains", c.chains, "config");
  detail::read_opt(j, "seed", c.seed, "config");
  detail::read_opt(j, "output", c.output, "config");
  detail::read_opt(j, "threads", c.threads, "config");
  detail::read_opt(j, "validation_mode", c.validation_mode, "config");
  detail::read_opt(j, "include_third_term", c.include_third_term, "config");
  validate_config(c);
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

// Canonical form with every default spelled out; parses back to an equal
// object.
inline Json to_json(const RunConfig& c) {
  Json j;
  j["experiment"] = c.experiment;
  if (c.code) {
    Json code;
    code["family"] = c.code->family;
    code["sizes"] = c.code->sizes;
    code["d"] = c.code->d;
    if (!c.code->file.empty()) code["file"] = c.code->file;
    if (!c.code->generators.empty()) code["generators"] = c.code->generators;
    j["code"] = code;
  }
  if (c.noise) {
    Json noise;
    noise["kind"] = c.noise->kind;
    noise["p"] = c.noise->p;
    noise["pz"] = c.noise->pz;
    if (c.noise->weight_cap) noise["weight_cap"] = *c.noise->weight_cap;
    j["noise"] = noise;
  }
  j["p_grid"] = c.p_grid;
  j["beta_grid"] = c.beta_grid;
  j["replicas"] = c.replicas;
  j["lattice_sizes"] = c.lattice_sizes;
  j["mode"] = c.mode;
  j["samples"] = c.samples;
  j["sweeps"] = c.sweeps;
  j["burn_in"] = c.burn_in;
  j["chains"] = c.chains;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["threads"] = c.threads;
  j["validation_mode"] = c.validation_mode;
  j["include_third_term"] = c.include_third_term;
  return j;
}

inline NoiseModel noise_model(const NoiseSpec& n) {
  return NoiseModel{NoiseModel::parse_kind(n.kind), n.p, n.pz};
}

// The codes named by a spec, with the size used in decay fits.
inline std::vector<ScanEntry> build_codes(const CodeSpec& spec) {
  std::vector<ScanEntry> out;
  if (spec.family == "repetition") {
    for (auto n : spec.sizes) {
      auto code = make_repetition(n);
      out.push_back({code.name(), code, static_cast<double>(n)});
    }
  } else if (spec.family == "toric" || spec.family == "toric_qudit") {
    const std::uint32_t d = spec.family == "toric" ? 2 : spec.d;
    for (auto L : spec.sizes) {
      auto code = make_toric_qudit(L, d);
      out.push_back({code.name(), code, static_cast<double>(L)});
    }
  } else if (spec.family == "five_qubit") {
    auto code = make_five_qubit();
    out.push_back({code.name(), code, 3.0});
  } else {
    StabilizerCode code = [&] {
      if (!spec.file.empty()) return read_code_file(spec.file);
      std::vector<SympVector> gens;
      for (const auto& g : spec.generators) gens.push_back(SympVector::parse(g, spec.d));
      return make_custom(std::move(gens));
    }();
    out.push_back({code.name(), code, static_cast<double>(code.n())});
  }
  return out;
}

}  // namespace aqec::cli
