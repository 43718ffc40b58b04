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

// Command-line front end: `run <config.json>` and `report <record.json>`.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aqec/cli/config.hpp"
#include "aqec/cli/experiments.hpp"
#include "aqec/error.hpp"

namespace aqec::cli {

inline constexpr const char* kCacheEnv = "AQEC_CACHE_DIR";

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Content hash of everything that determines the numbers: the canonical
// config minus parallelism and output location, the code tableaux and the
// artifact version.
inline std::string cache_key(const RunConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("threads");
  j.erase("output");
  std::string material = j.dump();
  if (cfg.code) {
    for (const auto& e : build_codes(*cfg.code)) material += write_code_text(e.code);
  }
  material += kArtifactVersion;
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(material);
  return out.str();
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

struct RunOptions {
  std::optional<std::size_t> threads;
  std::optional<std::string> cache_dir;
  bool validate_only = false;
  bool use_cache = true;
};

inline std::optional<std::filesystem::path> resolve_cache_dir(const RunOptions& opt) {
  if (!opt.use_cache) return std::nullopt;
  if (opt.cache_dir) return std::filesystem::path(*opt.cache_dir);
  if (const char* env = std::getenv(kCacheEnv); env && *env) return std::filesystem::path(env);
  return std::filesystem::path(".aqec-cache");
}

inline int command_run(const std::string& config_path, const RunOptions& opt, std::ostream& out,
                       std::ostream& err) {
  RunConfig cfg = read_config_file(config_path);
  if (opt.threads) cfg.threads = *opt.threads;
  validate_config(cfg);
  if (cfg.code) build_codes(*cfg.code);  // custom tableaux are validated here
  if (opt.validate_only) {
    out << "config ok: " << cfg.experiment << "\n";
    return 0;
  }
  const auto cache_dir = resolve_cache_dir(opt);
  const std::string key = cache_key(cfg);
  RunOutput result;
  bool hit = false;
  if (cache_dir && std::filesystem::exists(*cache_dir / (key + ".json"))) {
    const Json cached = Json::parse(read_text(*cache_dir / (key + ".json")));
    result.record = cached.at("record");
    result.csv = cached.at("csv").get<std::string>();
    result.exit_code = static_cast<ExitCode>(cached.at("exit_code").get<int>());
    // The echoed config carries this run's output and thread settings.
    result.record["config"] = to_json(cfg);
    hit = true;
    out << "cache hit " << key << "\n";
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    result = run_experiment(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    result.record["wall_clock_s"] = std::chrono::duration<double>(t1 - t0).count();
    if (cache_dir) {
      write_text(*cache_dir / (key + ".json"),
                 Json{{"record", result.record}, {"csv", result.csv},
                      {"exit_code", static_cast<int>(result.exit_code)}}.dump());
    }
  }
  result.record["cache_key"] = key;
  result.record["cache_hit"] = hit;
  write_text(cfg.output + ".json", result.record.dump(2) + "\n");
  write_text(cfg.output + ".csv", result.csv);
  out << "wrote " << cfg.output << ".json and " << cfg.output << ".csv\n";
  if (result.exit_code == ExitCode::kBoundViolation) {
    err << "bound violation: " << result.record["violations"].dump() << "\n";
  }
  return static_cast<int>(result.exit_code);
}

namespace detail {

inline std::string cell_text(const Json& v) {
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void print_slacks(const Json& rep, const std::string& label, std::ostream& out) {
  out << "  " << label << (rep.value("ok", true) ? " ok" : " VIOLATED");
  for (const auto& [k, v] : rep.items()) {
    if (k.starts_with("slack")) out << "  " << k << "=" << cell_text(v);
  }
  out << "\n";
}

}  // namespace detail

inline int command_report(const std::string& record_path, std::ostream& out) {
  Json rec;
  try {
    rec = Json::parse(read_text(record_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
  if (!rec.is_object()) throw ConfigError("malformed record: not an object");
  const Json cells = rec.value("cells", Json::array());
  if (!cells.is_array()) throw ConfigError("malformed record: 'cells' is not an array");
  if (cells.empty()) {
    out << "no cells in record\n";
    return 0;
  }
  out << "experiment " << rec.value("experiment", std::string("?")) << ", version "
      << rec.value("version", std::string("?")) << ", seed " << rec.value("seed", Json(0)).dump()
      << "\n";
  for (const auto& cell : cells) {
    std::string line;
    for (const auto& [k, v] : cell.items()) {
      if (v.is_object()) continue;
      line += k + "=" + detail::cell_text(v) + "  ";
    }
    out << line << "\n";
    for (const auto& [k, v] : cell.items()) {
      if (!v.is_object()) continue;
      if (k == "bounds" || k == "thm1" || k == "thm2") {
        if (v.contains("skipped")) {
          out << "  " << k << " skipped: " << v["skipped"].get<std::string>() << "\n";
        } else {
          detail::print_slacks(v, k, out);
        }
      } else {
        out << "  " << k << ":";
        for (const auto& [kk, vv] : v.items()) out << " " << kk << "=" << detail::cell_text(vv);
        out << "\n";
      }
    }
  }
  if (rec.contains("crossing_interval")) {
    const auto& ci = rec["crossing_interval"];
    if (ci.is_array()) {
      out << "crossing interval [" << num(ci[0].get<double>()) << ", " << num(ci[1].get<double>())
          << "]\n";
    } else {
      out << "crossing interval: none found\n";
    }
  }
  if (rec.contains("violations") && !rec["violations"].empty()) {
    out << rec["violations"].size() << " bound violation(s)\n";
  }
  return 0;
}

// Full command line; returns the process exit code.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"aqec: intrinsic error thresholds from the approximate-QEC condition"};
  app.require_subcommand(1);
  RunOptions opt;
  std::size_t threads = 0;
  std::string cache_dir;
  bool no_cache = false;
  app.add_option("--threads", threads, "worker threads (overrides the config)");
  app.add_option("--cache-dir", cache_dir, "result cache directory");
  app.add_flag("--no-cache", no_cache, "do not read or write the result cache");
  app.add_flag("--validate-only", opt.validate_only, "check the config and exit");
  std::string config_path;
  std::string record_path;
  auto* run = app.add_subcommand("run", "execute the experiment named by a config");
  run->add_option("config", config_path, "run config (JSON)")->required();
  auto* report = app.add_subcommand("report", "summarize a result record");
  report->add_option("record", record_path, "result record (JSON)")->required();
  // Global options are accepted after the subcommand as well.
  run->fallthrough();
  report->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfigError);
  }
  if (threads > 0) opt.threads = threads;
  if (!cache_dir.empty()) opt.cache_dir = cache_dir;
  opt.use_cache = !no_cache;
  try {
    if (run->parsed()) return command_run(config_path, opt, out, err);
    return command_report(record_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfigError);
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kConfigError);
  } catch (const BudgetError& e) {
    err << "budget error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kBudgetError);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace aqec::cli
