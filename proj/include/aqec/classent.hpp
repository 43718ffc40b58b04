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

// Class probabilities Pr(s, l) = sum_{m in M} Pr(s + l + m) and everything
// built from them: the conditional entropy H(L|S), free-energy costs, MLD,
// replica traces and threshold scans, exactly or by Monte Carlo.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqec/codes.hpp"
#include "aqec/coset_sum.hpp"
#include "aqec/error.hpp"
#include "aqec/noise.hpp"
#include "aqec/parallel.hpp"
#include "aqec/rng.hpp"

namespace aqec {

inline constexpr std::uint64_t kGrayRankLimit = std::uint64_t{1} << 14;
inline constexpr std::uint64_t kExactTableBudget = std::uint64_t{1} << 24;
inline constexpr double kTieTolerance = 1e-12;

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Mean and standard error (sample std / sqrt(n)) of values summed in index
// order, so the result does not depend on how they were produced.
inline McEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  McEstimate e;
  e.n_samples = values.size();
  e.seed = seed;
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                            static_cast<double>(values.size()));
  }
  return e;
}

struct MldResult {
  std::size_t decoded = 0;  // canonical class index
  bool tie = false;
  std::vector<double> class_probabilities;  // Pr(s, l) by class index
};

// Per-sample quantities, all taken from one set of coset sums.
struct SampleTerms {
  std::size_t true_class = 0;
  std::size_t decoded = 0;
  bool tie = false;
  std::vector<double> costs;  // Delta(eta, c) per relative class c
  double entropy_term = 0.0;  // -ln Pr(l(eta) | s(eta))
  double log_z = 0.0;         // ln Z(eta)
  double log_z_total = 0.0;   // ln sum_l Z(eta + l) = ln Pr(s(eta))
};

// ln sum_c exp(-costs[c]), summed in class order.
inline double log_sum_exp_neg(const std::vector<double>& costs) {
  double top = kNegInf;
  for (double c : costs) top = std::max(top, -c);
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double c : costs) acc += std::exp(-c - top);
  return top + std::log(acc);
}

class ClassEngine {
 public:
  struct Workspace {
    std::vector<std::vector<double>> tables;
  };

  ClassEngine(StabilizerCode code, WeylChannel channel, CosetMethod method = CosetMethod::kAuto)
      : code_(std::move(code)), channel_(std::move(channel)) {
    plan_ = std::make_shared<SectorPlan>(code_, channel_);
    std::uint64_t size = 1;
    bool small = true;
    for (std::size_t j = 0; j < plan_->rank(); ++j) {
      size *= code_.d();
      if (size > kGrayRankLimit) small = false;
    }
    method_ = method;
    if (method_ == CosetMethod::kAuto) {
      method_ = small ? CosetMethod::kGray : CosetMethod::kElimination;
    }
    if (method_ == CosetMethod::kElimination) {
      elimination_ = std::make_shared<EliminationPlan>(*plan_);
    }
  }

  const StabilizerCode& code() const { return code_; }
  const WeylChannel& channel() const { return channel_; }
  const SectorPlan& plan() const { return *plan_; }
  CosetMethod method() const { return method_; }

  // ln Z(v) = ln sum_{m in M} Pr(v + m) for a vector already inside W.
  double log_sector_sum(const SympVector& v, Workspace& ws) const {
    if (method_ == CosetMethod::kGray) return gray_log_coset_sum(*plan_, v);
    return elimination_->log_sum(*plan_, v, ws.tables);
  }

  // ln Z(v) for any v.
  double log_z(const SympVector& v, Workspace& ws) const {
    if (plan_->in_sector(v)) return log_sector_sum(v, ws);
    const auto shifted = plan_->shift_into_sector(v);
    return shifted ? log_sector_sum(*shifted, ws) : kNegInf;
  }
  double log_z(const SympVector& v) const {
    Workspace ws;
    return log_z(v, ws);
  }

  // ln Z(eta + l_c) for every relative class c; eta must lie in W.
  std::vector<double> relative_log_weights(const SympVector& eta, Workspace& ws) const {
    std::vector<double> out(code_.num_classes(), kNegInf);
    for (std::size_t c = 0; c < out.size(); ++c) {
      const auto& o = plan_->offsets()[c];
      if (o) out[c] = log_sector_sum(eta + *o, ws);
    }
    return out;
  }

  // Delta(eta, l) = -ln[Z(eta + l) / Z(eta)] for every relative class.
  std::vector<double> free_energy_costs(const SympVector& eta, Workspace& ws) const {
    return costs_from_weights(relative_log_weights(in_sector_or_throw(eta), ws));
  }

  static std::vector<double> costs_from_weights(const std::vector<double>& w) {
    if (w[0] == kNegInf) throw DegenerateInputError("Z(eta) = 0: free-energy cost undefined");
    std::vector<double> costs(w.size());
    for (std::size_t c = 0; c < w.size(); ++c) {
      costs[c] = w[c] == kNegInf ? std::numeric_limits<double>::infinity() : -(w[c] - w[0]);
    }
    costs[0] = 0.0;
    return costs;
  }

  double free_energy_cost(const SympVector& eta, std::span<const std::uint32_t> l) const {
    Workspace ws;
    return free_energy_costs(eta, ws)[code_.class_index(l)];
  }

  SampleTerms sample_terms(const SympVector& eta, Workspace& ws) const {
    SampleTerms t;
    t.true_class = code_.class_index(decompose(code_, eta).logical_class);
    const auto w = relative_log_weights(in_sector_or_throw(eta), ws);
    t.costs = costs_from_weights(w);
    t.entropy_term = log_sum_exp_neg(t.costs);
    t.log_z = w[0];
    t.log_z_total = t.log_z + t.entropy_term;
    // Decoded class: the largest weight, lowest canonical index on ties.
    const auto base = code_.class_coeffs(t.true_class);
    double best = std::numeric_limits<double>::infinity();
    for (double c : t.costs) best = std::min(best, c);
    std::size_t decoded = code_.num_classes();
    std::size_t near = 0;
    for (std::size_t c = 0; c < t.costs.size(); ++c) {
      if (t.costs[c] > best + kTieTolerance) continue;
      ++near;
      const std::size_t abs = absolute_class(base, c);
      decoded = std::min(decoded, abs);
    }
    t.decoded = decoded;
    t.tie = near > 1;
    return t;
  }

  double class_probability(std::span<const std::uint32_t> syndrome,
                           std::span<const std::uint32_t> logical) const {
    SympVector v = code_.syndrome_vector(syndrome);
    v += code_.logical_vector(logical);
    return std::exp(log_z(v));
  }

  MldResult mld_decode(std::span<const std::uint32_t> syndrome) const {
    Workspace ws;
    MldResult r;
    r.class_probabilities.assign(code_.num_classes(), 0.0);
    const auto shifted = plan_->shift_into_sector(code_.syndrome_vector(syndrome));
    if (!shifted) {
      r.tie = code_.num_classes() > 1;
      return r;
    }
    // shifted = s + m has logical class 0, so relative and absolute classes agree.
    const auto w = relative_log_weights(*shifted, ws);
    double best = kNegInf;
    for (double x : w) best = std::max(best, x);
    std::size_t near = 0;
    bool first = true;
    for (std::size_t c = 0; c < w.size(); ++c) {
      r.class_probabilities[c] = std::exp(w[c]);
      if (w[c] == kNegInf || w[c] < best - kTieTolerance) continue;
      ++near;
      if (first) r.decoded = c;
      first = false;
    }
    r.tie = near > 1 || best == kNegInf;
    return r;
  }

 private:
  SympVector in_sector_or_throw(const SympVector& eta) const {
    if (plan_->in_sector(eta)) return eta;
    // The class structure is relative to eta; shifting by M keeps it.
    auto shifted = plan_->shift_into_sector(eta);
    if (!shifted) throw DegenerateInputError("Z(eta) = 0: free-energy cost undefined");
    return *shifted;
  }

  std::size_t absolute_class(const std::vector<std::uint32_t>& base, std::size_t rel) const {
    auto coeffs = code_.class_coeffs(rel);
    for (std::size_t t = 0; t < coeffs.size(); ++t) coeffs[t] = (coeffs[t] + base[t]) % code_.d();
    return code_.class_index(coeffs);
  }

  StabilizerCode code_;
  WeylChannel channel_;
  std::shared_ptr<SectorPlan> plan_;
  std::shared_ptr<EliminationPlan> elimination_;
  CosetMethod method_ = CosetMethod::kAuto;
};

// Syndrome -> Pr(s, l) over canonical class indices; syndromes with zero
// probability are absent.
struct ClassTable {
  std::size_t num_classes = 1;
  double K = 1.0;
  std::map<std::vector<std::uint32_t>, std::vector<double>> entries;

  double total_mass() const {
    double t = 0.0;
    for (const auto& [s, v] : entries) {
      for (double p : v) t += p;
    }
    return t;
  }
  double min_entry() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [s, v] : entries) {
      for (double p : v) m = std::min(m, p);
    }
    return m;
  }
  // H(L|S) = -sum Pr(s,l) ln Pr(l|s).
  double conditional_entropy() const {
    double h = 0.0;
    for (const auto& [s, v] : entries) {
      const double ps = std::accumulate(v.begin(), v.end(), 0.0);
      for (double p : v) {
        if (p > 0.0) h -= p * std::log(p / ps);
      }
    }
    return h;
  }
  // sum_s max_l Pr(s, l).
  double mld_success() const {
    double t = 0.0;
    for (const auto& [s, v] : entries) t += *std::ranges::max_element(v);
    return t;
  }
  // (tr Lambda^R, tr (Lambda+B)^R) from class-table power sums.
  std::pair<double, double> replica_traces(int R) const {
    double lam = 0.0;
    double full = 0.0;
    for (const auto& [s, v] : entries) {
      double ps = 0.0;
      for (double p : v) {
        lam += std::pow(p, R);
        ps += p;
      }
      full += std::pow(ps, R);
    }
    const double pref = std::pow(K, 1 - R);
    return {pref * lam, pref * full};
  }
};

// Exact table by enumerating W / (M cap W): each quotient representative r
// is one (s, l) pair with Pr(s, l) = Z(r).
inline ClassTable build_class_table(const ClassEngine& engine, std::size_t threads = 1,
                                    std::uint64_t budget = kExactTableBudget) {
  const auto& code = engine.code();
  const auto& plan = engine.plan();
  const auto& q = plan.quotient_basis();
  const std::uint32_t d = code.d();
  std::uint64_t count = 1;
  for (std::size_t t = 0; t < q.size(); ++t) {
    count *= d;
    if (count > budget) throw BudgetError("class table needs more than " + std::to_string(budget) + " coset sums");
  }
  std::vector<double> logz(count);
  std::vector<std::vector<std::uint32_t>> syn(count);
  std::vector<std::size_t> cls(count);
  parallel_for(count, threads, [&](std::size_t begin, std::size_t end) {
    ClassEngine::Workspace ws;
    for (std::size_t idx = begin; idx < end; ++idx) {
      SympVector r = code.zero();
      std::uint64_t rest = idx;
      for (const auto& b : q) {
        r.add_scaled(b, static_cast<std::uint32_t>(rest % d));
        rest /= d;
      }
      auto dec = decompose(code, r);
      syn[idx] = std::move(dec.syndrome);
      cls[idx] = code.class_index(dec.logical_class);
      logz[idx] = engine.log_sector_sum(r, ws);
    }
  });
  ClassTable table;
  table.num_classes = code.num_classes();
  table.K = static_cast<double>(code.K());
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    if (logz[idx] == kNegInf) continue;
    auto& row = table.entries[syn[idx]];
    if (row.empty()) row.assign(table.num_classes, 0.0);
    row[cls[idx]] = std::exp(logz[idx]);
  }
  return table;
}

inline double class_probability(const StabilizerCode& code, const WeylChannel& ch,
                                std::span<const std::uint32_t> syndrome,
                                std::span<const std::uint32_t> logical) {
  return ClassEngine(code, ch).class_probability(syndrome, logical);
}

inline double conditional_entropy_exact(const StabilizerCode& code, const WeylChannel& ch,
                                        std::size_t threads = 1) {
  return build_class_table(ClassEngine(code, ch), threads).conditional_entropy();
}

inline double mld_success_exact(const StabilizerCode& code, const WeylChannel& ch,
                                std::size_t threads = 1) {
  return build_class_table(ClassEngine(code, ch), threads).mld_success();
}

// Per-sample terms for samples [0, n), sample i drawn from stream (seed, i).
inline std::vector<SampleTerms> sample_all(const ClassEngine& engine, std::uint64_t n_samples,
                                           std::uint64_t seed, std::size_t threads = 1) {
  std::vector<SampleTerms> out(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t begin, std::size_t end) {
    ClassEngine::Workspace ws;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = stream_rng(seed, i);
      out[i] = engine.sample_terms(engine.channel().sample(rng), ws);
    }
  });
  return out;
}

struct McCell {
  McEstimate entropy;
  McEstimate success;
  std::uint64_t ties = 0;
};

inline McCell mc_cell(const ClassEngine& engine, std::uint64_t n_samples, std::uint64_t seed,
                      std::size_t threads = 1) {
  const auto terms = sample_all(engine, n_samples, seed, threads);
  std::vector<double> h(terms.size());
  std::vector<double> s(terms.size());
  McCell cell;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    h[i] = terms[i].entropy_term;
    s[i] = terms[i].decoded == terms[i].true_class ? 1.0 : 0.0;
    cell.ties += terms[i].tie ? 1 : 0;
  }
  cell.entropy = summarize(h, seed);
  cell.success = summarize(s, seed);
  return cell;
}

inline McEstimate conditional_entropy_mc(const ClassEngine& engine, std::uint64_t n_samples,
                                         std::uint64_t seed, std::size_t threads = 1) {
  return mc_cell(engine, n_samples, seed, threads).entropy;
}

inline McEstimate mld_success_mc(const ClassEngine& engine, std::uint64_t n_samples,
                                 std::uint64_t seed, std::size_t threads = 1) {
  return mc_cell(engine, n_samples, seed, threads).success;
}

struct ReplicaTraces {
  double lambda = 0.0;  // tr Lambda^R
  double full = 0.0;    // tr (Lambda+B)^R
  double lambda_err = 0.0;
  double full_err = 0.0;
  // (1/(R-1)) ln(full / lambda)
  double ratio(int R) const { return std::log(full / lambda) / (R - 1); }
};

inline ReplicaTraces replica_trace_exact(const ClassEngine& engine, int R) {
  if (R < 2) throw DegenerateInputError("replica traces need R >= 2");
  const auto [lam, full] = build_class_table(engine).replica_traces(R);
  return {lam, full, 0.0, 0.0};
}

// tr Lambda^R = K^{1-R} E[Z(eta)^{R-1}], tr (Lambda+B)^R = K^{1-R} E[Pr(s(eta))^{R-1}].
inline ReplicaTraces replica_trace_mc(const ClassEngine& engine, int R, std::uint64_t n_samples,
                                      std::uint64_t seed, std::size_t threads = 1) {
  if (R < 2) throw DegenerateInputError("replica traces need R >= 2");
  const auto terms = sample_all(engine, n_samples, seed, threads);
  std::vector<double> a(terms.size());
  std::vector<double> b(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    a[i] = std::exp((R - 1) * terms[i].log_z);
    b[i] = std::exp((R - 1) * terms[i].log_z_total);
  }
  const double pref = std::pow(static_cast<double>(engine.code().K()), 1 - R);
  const auto ea = summarize(a, seed);
  const auto eb = summarize(b, seed);
  return {pref * ea.mean, pref * eb.mean, pref * ea.std_error, pref * eb.std_error};
}

// ---- threshold scans ----

enum class ScanMode { kExact, kMonteCarlo };

inline std::string mode_name(ScanMode m) { return m == ScanMode::kExact ? "exact" : "mc"; }

struct ScanEntry {
  std::string id;
  StabilizerCode code;
  double size = 0.0;  // distance-like size used by the decay fit
};

struct ScanRow {
  std::string code_id;
  std::size_t n = 0;
  std::size_t k = 0;
  double p = 0.0;
  std::string mode;
  double H = 0.0;
  double H_stderr = 0.0;
  double success = 0.0;
  double success_stderr = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct Crossing {
  std::string code_a;
  std::string code_b;
  double p_lo = 0.0;
  double p_hi = 0.0;
  double p_interp = 0.0;
};

struct DecayFit {
  double p = 0.0;
  double xi = 0.0;  // H ~ A exp(-size / xi); infinite when H does not decay
  double slope = 0.0;
  double intercept = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<Crossing> crossings;
  std::optional<std::pair<double, double>> crossing_interval;
  std::vector<DecayFit> decay;
};

// Sign changes of H_a - H_b between consecutive grid points, for each pair of
// consecutive sizes. Each bracket [p_i, p_{i+1}] is reported with the linear
// interpolation of the difference.
inline std::vector<Crossing> find_crossings(const std::vector<std::string>& ids,
                                            const std::vector<double>& grid,
                                            const std::vector<std::vector<double>>& H) {
  std::vector<Crossing> out;
  for (std::size_t a = 0; a + 1 < ids.size(); ++a) {
    const std::size_t b = a + 1;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double d0 = H[a][i] - H[b][i];
      const double d1 = H[a][i + 1] - H[b][i + 1];
      if (d0 == 0.0 && d1 == 0.0) continue;
      if ((d0 < 0.0) == (d1 < 0.0) && d0 != 0.0 && d1 != 0.0) continue;
      const double t = d0 / (d0 - d1);
      out.push_back({ids[a], ids[b], grid[i], grid[i + 1], grid[i] + t * (grid[i + 1] - grid[i])});
    }
  }
  return out;
}

inline std::optional<std::pair<double, double>> crossing_union(const std::vector<Crossing>& cs) {
  if (cs.empty()) return std::nullopt;
  double lo = cs.front().p_lo;
  double hi = cs.front().p_hi;
  for (const auto& c : cs) {
    lo = std::min(lo, c.p_lo);
    hi = std::max(hi, c.p_hi);
  }
  return std::pair{lo, hi};
}

// Least-squares fit of ln H against size at one p.
inline std::optional<DecayFit> fit_decay(double p, const std::vector<double>& sizes,
                                         const std::vector<double>& H) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (H[i] > 0.0) {
      xs.push_back(sizes[i]);
      ys.push_back(std::log(H[i]));
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  DecayFit f;
  f.p = p;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.xi = f.slope < 0.0 ? -1.0 / f.slope : std::numeric_limits<double>::infinity();
  return f;
}

inline ScanResult threshold_scan(const std::vector<ScanEntry>& family, const NoiseModel& noise,
                                 const std::vector<double>& p_grid, ScanMode mode,
                                 std::uint64_t samples, std::uint64_t seed,
                                 std::size_t threads = 1) {
  ScanResult res;
  std::vector<std::vector<double>> H(family.size(), std::vector<double>(p_grid.size()));
  for (std::size_t c = 0; c < family.size(); ++c) {
    const auto& e = family[c];
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
      ScanRow row;
      row.code_id = e.id;
      row.n = e.code.n();
      row.k = e.code.k();
      row.p = p_grid[i];
      row.mode = mode_name(mode);
      const ClassEngine engine(e.code, noise.at(p_grid[i]).make(e.code.n(), e.code.d()));
      if (mode == ScanMode::kExact) {
        const auto table = build_class_table(engine, threads);
        row.H = table.conditional_entropy();
        row.success = table.mld_success();
        row.seed = seed;
      } else {
        row.seed = derive_seed(seed, c * p_grid.size() + i);
        const auto cell = mc_cell(engine, samples, row.seed, threads);
        row.H = cell.entropy.mean;
        row.H_stderr = cell.entropy.std_error;
        row.success = cell.success.mean;
        row.success_stderr = cell.success.std_error;
        row.samples = samples;
      }
      H[c][i] = row.H;
      res.rows.push_back(row);
    }
  }
  std::vector<std::string> ids;
  std::vector<double> sizes;
  for (const auto& e : family) {
    ids.push_back(e.id);
    sizes.push_back(e.size);
  }
  res.crossings = find_crossings(ids, p_grid, H);
  res.crossing_interval = crossing_union(res.crossings);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    std::vector<double> col;
    for (std::size_t c = 0; c < family.size(); ++c) col.push_back(H[c][i]);
    if (auto f = fit_decay(p_grid[i], sizes, col)) res.decay.push_back(*f);
  }
  return res;
}

}  // namespace aqec
