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

// The experiments behind `run`. Each returns a result record (JSON) and a
// CSV table; neither depends on the thread count.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "aqec/bounds.hpp"
#include "aqec/classent.hpp"
#include "aqec/cli/config.hpp"
#include "aqec/error.hpp"
#include "aqec/exactkl.hpp"
#include "aqec/imperfect.hpp"
#include "aqec/pipeline.hpp"

namespace aqec::cli {

inline constexpr const char* kArtifactVersion = "0.3.0";

struct RunOutput {
  Json record;
  std::string csv;
  ExitCode exit_code = ExitCode::kSuccess;
};

// Shortest text that reads back to the same double.
inline std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// JSON has no infinities; they are written as strings.
inline Json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : cols_(header.size()) {
    add_row(header);
  }
  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw Error("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::size_t cols_;
  std::string text_;
};

inline const std::vector<std::string>& scan_columns() {
  static const std::vector<std::string> cols = {"code_id", "n", "k", "p", "mode", "H", "H_stderr",
                                                "success", "success_stderr", "samples", "seed"};
  return cols;
}

inline const std::vector<std::string>& imperfect_columns() {
  static const std::vector<std::string> cols = {"L", "beta", "p", "R", "method",
                                                "S", "S_err", "sweeps", "seed"};
  return cols;
}

inline Json fidelity_report_json(const FidelityBoundReport& r) {
  return Json{{"instance", r.instance},
              {"S", jnum(r.entropy)},
              {"F_e", r.fidelity},
              {"ok", r.ok},
              {"slack_S_nonnegative", jnum(r.entropy_lower_slack)},
              {"slack_S_below_2lnK", jnum(r.entropy_upper_slack)},
              {"slack_F_below_1", r.fidelity_upper_slack},
              {"slack_petz_lower", jnum(r.petz_lower_slack)},
              {"slack_converse", jnum(r.converse_slack)}};
}

inline Json success_report_json(const SuccessBoundReport& r) {
  return Json{{"instance", r.instance},   {"H", r.entropy},
              {"success", r.success},     {"ok", r.ok},
              {"slack_lower", r.lower_slack}, {"slack_upper", r.upper_slack}};
}

inline Json base_record(const RunConfig& cfg) {
  Json rec;
  rec["artifact"] = "aqec";
  rec["version"] = kArtifactVersion;
  rec["experiment"] = cfg.experiment;
  rec["seed"] = cfg.seed;
  rec["config"] = to_json(cfg);
  rec["cells"] = Json::array();
  return rec;
}

inline ScanRow exact_row(const ScanEntry& e, double p, const ClassAnalysis& a, std::uint64_t seed) {
  ScanRow r;
  r.code_id = e.id;
  r.n = e.code.n();
  r.k = e.code.k();
  r.p = p;
  r.mode = "exact";
  r.H = a.entropy;
  r.success = a.success;
  r.seed = seed;
  return r;
}

inline Json scan_row_json(const ScanRow& r) {
  return Json{{"code_id", r.code_id}, {"n", r.n},         {"k", r.k},
              {"p", r.p},             {"mode", r.mode},   {"H", r.H},
              {"H_stderr", r.H_stderr}, {"success", r.success},
              {"success_stderr", r.success_stderr}, {"samples", r.samples}, {"seed", r.seed}};
}

inline void add_scan_row(CsvTable& csv, const ScanRow& r) {
  csv.add_row({r.code_id, std::to_string(r.n), std::to_string(r.k), num(r.p), r.mode, num(r.H),
               num(r.H_stderr), num(r.success), num(r.success_stderr), std::to_string(r.samples),
               std::to_string(r.seed)});
}

inline RunOutput run_kl_check(const RunConfig& cfg) {
  RunOutput out{base_record(cfg), {}, ExitCode::kSuccess};
  CsvTable csv({"code_id", "n", "k", "p", "kraus_terms", "merged_terms", "kraus_mass", "S",
                "exact_kl", "petz_fidelity", "coherent_information", "blocks"});
  const auto model = noise_model(*cfg.noise);
  for (const auto& e : build_codes(*cfg.code)) {
    for (double p : cfg.rates()) {
      const auto ch = model.at(p).make(e.code.n(), e.code.d());
      const auto a = analyze_dense(e.code, ch, cfg.noise->weight_cap);
      const double K = static_cast<double>(e.code.K());
      const auto rep = check_bounds_thm1(a.relative_entropy.value, a.petz_fidelity, K,
                                         instance_name(e.code, ch, p));
      out.record["cells"].push_back(Json{
          {"code_id", e.id},
          {"n", e.code.n()},
          {"k", e.code.k()},
          {"p", p},
          {"kraus_terms", a.kraus_terms},
          {"merged_terms", a.merged_terms},
          {"kraus_mass", a.kraus_mass},
          {"mass_deficit", 1.0 - a.kraus_mass},
          {"S", jnum(a.relative_entropy.value)},
          {"S_finite", a.relative_entropy.finite},
          {"exact_kl", a.exact_kl},
          {"petz_fidelity", a.petz_fidelity},
          {"petz_fidelity_raw", a.petz_fidelity_raw},
          {"coherent_information", a.coherent.value},
          {"gram_invariants_ok", a.invariants.ok()},
          {"blocks", a.blocks},
          {"bounds", fidelity_report_json(rep)}});
      csv.add_row({e.id, std::to_string(e.code.n()), std::to_string(e.code.k()), num(p),
                   std::to_string(a.kraus_terms), std::to_string(a.merged_terms),
                   num(a.kraus_mass), num(a.relative_entropy.value), a.exact_kl ? "1" : "0",
                   num(a.petz_fidelity), num(a.coherent.value), std::to_string(a.blocks)});
    }
  }
  out.csv = csv.text();
  return out;
}

// entropy-exact, entropy-mc and mld share the scan table.
inline RunOutput run_entropy(const RunConfig& cfg, bool mc) {
  RunOutput out{base_record(cfg), {}, ExitCode::kSuccess};
  CsvTable csv(scan_columns());
  const auto model = noise_model(*cfg.noise);
  const auto codes = build_codes(*cfg.code);
  const auto rates = cfg.rates();
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const auto& e = codes[c];
    for (std::size_t i = 0; i < rates.size(); ++i) {
      const double p = rates[i];
      const auto ch = model.at(p).make(e.code.n(), e.code.d());
      ScanRow row;
      if (!mc) {
        row = exact_row(e, p, analyze_classes(e.code, ch, cfg.threads), cfg.seed);
      } else {
        const ClassEngine engine(e.code, ch);
        row.code_id = e.id;
        row.n = e.code.n();
        row.k = e.code.k();
        row.p = p;
        row.mode = "mc";
        row.seed = derive_seed(cfg.seed, c * rates.size() + i);
        const auto cell = mc_cell(engine, cfg.samples, row.seed, cfg.threads);
        row.H = cell.entropy.mean;
        row.H_stderr = cell.entropy.std_error;
        row.success = cell.success.mean;
        row.success_stderr = cell.success.std_error;
        row.samples = cfg.samples;
      }
      out.record["cells"].push_back(scan_row_json(row));
      add_scan_row(csv, row);
    }
  }
  out.csv = csv.text();
  return out;
}

inline RunOutput run_replica(const RunConfig& cfg) {
  RunOutput out{base_record(cfg), {}, ExitCode::kSuccess};
  CsvTable csv({"code_id", "n", "k", "p", "R", "mode", "tr_lambda", "tr_lambda_err", "tr_full",
                "tr_full_err", "renyi", "samples", "seed"});
  const auto model = noise_model(*cfg.noise);
  const auto codes = build_codes(*cfg.code);
  const auto rates = cfg.rates();
  const bool mc = cfg.mode == "mc";
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const auto& e = codes[c];
    for (std::size_t i = 0; i < rates.size(); ++i) {
      const auto ch = model.at(rates[i]).make(e.code.n(), e.code.d());
      const ClassEngine engine(e.code, ch);
      std::optional<ClassTable> table;
      if (!mc) table = build_class_table(engine, cfg.threads);
      for (int R : cfg.replicas) {
        const std::uint64_t seed = derive_seed(cfg.seed, (c * rates.size() + i) * 64 + R);
        ReplicaTraces tr;
        if (mc) {
          tr = replica_trace_mc(engine, R, cfg.samples, seed, cfg.threads);
        } else {
          const auto [lam, full] = table->replica_traces(R);
          tr = {lam, full, 0.0, 0.0};
        }
        const double ratio = tr.ratio(R);
        out.record["cells"].push_back(Json{{"code_id", e.id},
                                           {"p", rates[i]},
                                           {"R", R},
                                           {"mode", cfg.mode},
                                           {"tr_lambda", tr.lambda},
                                           {"tr_lambda_err", tr.lambda_err},
                                           {"tr_full", tr.full},
                                           {"tr_full_err", tr.full_err},
                                           {"renyi", jnum(ratio)},
                                           {"seed", mc ? seed : cfg.seed}});
        csv.add_row({e.id, std::to_string(e.code.n()), std::to_string(e.code.k()), num(rates[i]),
                     std::to_string(R), cfg.mode, num(tr.lambda), num(tr.lambda_err), num(tr.full),
                     num(tr.full_err), num(ratio), std::to_string(mc ? cfg.samples : 0),
                     std::to_string(mc ? seed : cfg.seed)});
      }
    }
  }
  out.csv = csv.text();
  return out;
}

inline RunOutput run_threshold_scan(const RunConfig& cfg) {
  RunOutput out{base_record(cfg), {}, ExitCode::kSuccess};
  CsvTable csv(scan_columns());
  const auto mode = cfg.mode == "mc" ? ScanMode::kMonteCarlo : ScanMode::kExact;
  const auto res = threshold_scan(build_codes(*cfg.code), noise_model(*cfg.noise), cfg.rates(),
                                  mode, cfg.samples, cfg.seed, cfg.threads);
  for (const auto& r : res.rows) {
    out.record["cells"].push_back(scan_row_json(r));
    add_scan_row(csv, r);
  }
  Json crossings = Json::array();
  for (const auto& c : res.crossings) {
    crossings.push_back(Json{{"code_a", c.code_a},
                             {"code_b", c.code_b},
                             {"p_lo", c.p_lo},
                             {"p_hi", c.p_hi},
                             {"p_interp", c.p_interp}});
  }
  out.record["crossings"] = crossings;
  if (res.crossing_interval) {
    out.record["crossing_interval"] = {res.crossing_interval->first, res.crossing_interval->second};
  } else {
    out.record["crossing_interval"] = nullptr;
  }
  Json decay = Json::array();
  for (const auto& f : res.decay) {
    decay.push_back(Json{{"p", f.p}, {"xi", jnum(f.xi)}, {"slope", f.slope}, {"intercept", f.intercept}});
  }
  out.record["decay_fits"] = decay;
  out.csv = csv.text();
  return out;
}

inline RunOutput run_imperfect(const RunConfig& cfg, bool mc) {
  RunOutput out{base_record(cfg), {}, ExitCode::kSuccess};
  CsvTable csv(imperfect_columns());
  const std::vector<int> replicas = cfg.replicas.empty() ? std::vector<int>{2} : cfg.replicas;
  std::uint64_t cell_index = 0;
  for (auto L : cfg.lattice_sizes) {
    for (double beta : cfg.beta_grid) {
      for (double p : cfg.p_grid) {
        for (int R : replicas) {
          const ImperfectPrep prep{L, beta, p, R};
          const double pert = perturbative_prediction(static_cast<double>(prep.n()), beta, prep.h(), R);
          Json cell{{"L", L}, {"beta", beta}, {"p", p}, {"R", R}, {"perturbative", pert}};
          auto emit = [&](const std::string& method, double S, double err, std::uint64_t sweeps,
                          std::uint64_t seed) {
            cell[method] = Json{{"S", jnum(S)}, {"S_err", err}, {"sweeps", sweeps}, {"seed", seed}};
            csv.add_row({std::to_string(L), num(beta), num(p), std::to_string(R), method, num(S),
                         num(err), std::to_string(sweeps), std::to_string(seed)});
          };
          const bool enumerable = static_cast<std::size_t>(R) * prep.n() <= kMaxExactSpins;
          if (!mc || cfg.validation_mode) {
            if (enumerable) {
              emit("exact", renyi_entropy_exact(prep), 0.0, 0, cfg.seed);
            } else if (R == 2 && prep.n() <= kMaxExactSpins) {
              emit("exact-marginal", renyi2_marginal_exact(L, beta, p), 0.0, 0, cfg.seed);
            } else if (!mc) {
              throw BudgetError("no exact route for L=" + std::to_string(L) + ", R=" + std::to_string(R));
            }
          }
          if (!mc && L == 2) {
            const auto basis = prepare_codewords(L, beta);
            const auto kraus = merge_equivalent_kraus(
                basis, kraus_enumerate(bit_flip(prep.n(), p), std::nullopt));
            emit("gram", renyi_ratio(build_gram(basis, kraus), R), 0.0, 0, cfg.seed);
          }
          if (mc) {
            RenyiMcOptions opt;
            opt.sweeps = cfg.sweeps;
            opt.burn_in = cfg.burn_in;
            opt.chains = cfg.chains;
            opt.include_third_term = cfg.include_third_term;
            opt.seed = derive_seed(cfg.seed, cell_index);
            const auto r = renyi_entropy_mc(prep, opt, cfg.threads);
            emit("mc", r.S, r.S_err, r.sweeps, opt.seed);
            cell["mc"]["mean_observable"] = r.mean_observable;
            cell["mc"]["observable_err"] = r.observable_err;
            cell["mc"]["lower_bound"] = r.lower_bound;
            cell["mc"]["tau_int"] = r.tau_int;
            cell["mc"]["converged"] = r.converged;
            cell["mc"]["acceptance"] = r.acceptance;
          }
          out.record["cells"].push_back(cell);
          ++cell_index;
        }
      }
    }
  }
  out.csv = csv.text();
  return out;
}

inline RunOutput run_bounds_suite(const RunConfig& cfg) {
  RunOutput out{base_record(cfg), {}, ExitCode::kSuccess};
  CsvTable csv({"code_id", "p", "S", "H", "F_e", "success", "thm1_ok", "thm2_ok"});
  const auto model = noise_model(*cfg.noise);
  Json violations = Json::array();
  for (const auto& e : build_codes(*cfg.code)) {
    for (double p : cfg.rates()) {
      const auto ch = model.at(p).make(e.code.n(), e.code.d());
      const double K = static_cast<double>(e.code.K());
      const std::string name = instance_name(e.code, ch, p);
      const auto cls = analyze_classes(e.code, ch, cfg.threads);
      const auto thm2 = check_bounds_thm2(cls.entropy, cls.success, K, name);
      Json cell{{"code_id", e.id}, {"p", p}, {"H", cls.entropy}, {"success", cls.success},
                {"thm2", success_report_json(thm2)}};
      std::string s_text = "";
      std::string f_text = "";
      bool thm1_ok = true;
      try {
        const auto dense = analyze_dense(e.code, ch, cfg.noise->weight_cap);
        const auto thm1 = check_bounds_thm1(dense.relative_entropy.value, dense.petz_fidelity, K, name);
        cell["S"] = jnum(dense.relative_entropy.value);
        cell["F_e"] = dense.petz_fidelity;
        cell["thm1"] = fidelity_report_json(thm1);
        thm1_ok = thm1.ok;
        s_text = num(dense.relative_entropy.value);
        f_text = num(dense.petz_fidelity);
        if (!thm1.ok) violations.push_back(cell["thm1"]);
      } catch (const BudgetError& err) {
        cell["thm1"] = Json{{"skipped", err.what()}};
      }
      if (!thm2.ok) violations.push_back(cell["thm2"]);
      out.record["cells"].push_back(cell);
      csv.add_row({e.id, num(p), s_text, num(cls.entropy), f_text, num(cls.success),
                   thm1_ok ? "1" : "0", thm2.ok ? "1" : "0"});
    }
  }
  out.record["violations"] = violations;
  if (!violations.empty()) out.exit_code = ExitCode::kBoundViolation;
  out.csv = csv.text();
  return out;
}

inline RunOutput run_experiment(const RunConfig& cfg) {
  validate_config(cfg);
  const auto& x = cfg.experiment;
  if (x == "kl-check") return run_kl_check(cfg);
  if (x == "entropy-exact") return run_entropy(cfg, false);
  if (x == "entropy-mc") return run_entropy(cfg, true);
  if (x == "mld") return run_entropy(cfg, cfg.mode == "mc");
  if (x == "replica") return run_replica(cfg);
  if (x == "threshold-scan") return run_threshold_scan(cfg);
  if (x == "imperfect-exact") return run_imperfect(cfg, false);
  if (x == "imperfect-mc") return run_imperfect(cfg, true);
  if (x == "bounds-suite") return run_bounds_suite(cfg);
  throw ConfigError("unknown experiment '" + x + "'");
}

}  // namespace aqec::cli
