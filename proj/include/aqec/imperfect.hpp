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

// The imperfectly prepared toric code: code words filtered by
// prod_p exp(beta B_p / 2) instead of projected, its B-matrix elements, and
// the R-replica spin model whose ratio of partition functions gives the
// Renyi relative entropy under bit-flip noise.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "aqec/codes.hpp"
#include "aqec/coset_sum.hpp"
#include "aqec/error.hpp"
#include "aqec/exactkl.hpp"
#include "aqec/noise.hpp"
#include "aqec/parallel.hpp"
#include "aqec/rng.hpp"

namespace aqec {

struct ImperfectPrep {
  std::size_t L = 2;
  double beta = 1.0;
  double p = 0.1;
  int R = 2;

  // Disorder field h = (1/2) ln((1-p)/p).
  double h() const { return 0.5 * std::log((1.0 - p) / p); }
  std::size_t n() const { return 2 * L * L; }

  void validate() const {
    if (L < 2) throw ValidationError("imperfect toric code needs L >= 2");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and positive");
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("the spin model needs 0 < p < 1");
    if (R < 2) throw ValidationError("replica count must be >= 2");
  }
};

// |++> ~ prod_p exp(beta B_p / 2) |+>^n, then Z_{l1}, Z_{l2} and both, in
// the order [++, -+, +-, --].
inline CodeBasis prepare_codewords(std::size_t L, double beta,
                                   std::uint64_t budget = kDefaultDenseBudget) {
  const ToricLattice lat(L);
  const std::size_t n = lat.num_edges();
  if (n >= 63) throw BudgetError("imperfect code words beyond dense budget");
  const std::uint64_t dim = hilbert_dimension(n, 2, budget);
  std::vector<std::uint64_t> pmask(L * L);
  for (std::size_t p = 0; p < pmask.size(); ++p) {
    for (auto e : lat.plaquette_edges(p)) pmask[p] |= std::uint64_t{1} << e;
  }
  std::uint64_t l1 = 0;
  std::uint64_t l2 = 0;
  for (auto e : lat.z_loop(1)) l1 |= std::uint64_t{1} << e;
  for (auto e : lat.z_loop(2)) l2 |= std::uint64_t{1} << e;

  CodeBasis basis;
  basis.n = n;
  basis.d = 2;
  basis.source = CodeSource::kImperfect;
  basis.beta = beta;
  basis.words.resize(static_cast<Eigen::Index>(dim), 4);
  const double P = static_cast<double>(pmask.size());
  for (std::uint64_t j = 0; j < dim; ++j) {
    // B_p |j> = (-1)^{|j & p|} |j>; exponent shifted by its maximum.
    double s = 0.0;
    for (auto m : pmask) s += (std::popcount(j & m) & 1) ? -1.0 : 1.0;
    const double a = std::exp(0.5 * beta * (s - P));
    const double s1 = (std::popcount(j & l1) & 1) ? -1.0 : 1.0;
    const double s2 = (std::popcount(j & l2) & 1) ? -1.0 : 1.0;
    const auto r = static_cast<Eigen::Index>(j);
    basis.words(r, 0) = a;
    basis.words(r, 1) = a * s1;
    basis.words(r, 2) = a * s2;
    basis.words(r, 3) = a * s1 * s2;
  }
  basis.words /= basis.words.col(0).norm();
  return basis;
}

// B element between (identity, q=0) and (X_e, q=0) under bit-flip noise:
// the Gram pair restricted to the Kraus pair {I, X_e}, minus its code-
// diagonal part. Edge defaults to h(0,0), which lies on the first Z loop.
inline Complex b_element(std::size_t L, double beta, double p, std::size_t edge = 0) {
  const ToricLattice lat(L);
  const std::size_t n = lat.num_edges();
  if (edge >= n) throw DimensionError("edge index out of range");
  if (p == 0.0) return 0.0;
  const auto basis = prepare_codewords(L, beta);
  const auto ch = bit_flip(n, p);
  SympVector xe(n, 2);
  xe.set_x(edge, 1);
  KrausSet pair;
  pair.terms.push_back({SympVector(n, 2), std::sqrt(ch.prob(SympVector(n, 2)))});
  pair.terms.push_back({xe, std::sqrt(ch.prob(xe))});
  pair.captured_mass = pair.terms[0].amplitude * pair.terms[0].amplitude +
                       pair.terms[1].amplitude * pair.terms[1].amplitude;
  const auto gram = build_gram(basis, pair);
  const auto K = static_cast<Eigen::Index>(basis.K());
  const CMatrix full = gram.dense_full();
  const CMatrix lambda = gram.dense_lambda();
  return full(0, K) - lambda(0, K);
}

// Spins eta_e^(a) in {+1, -1}, replica-major: index a * n + e.
struct ReplicaSpinConfig {
  std::size_t L = 2;
  int R = 2;
  std::vector<std::int8_t> spins;

  ReplicaSpinConfig(std::size_t L_, int R_)
      : L(L_), R(R_), spins(static_cast<std::size_t>(R_) * 2 * L_ * L_, 1) {}
  std::size_t n() const { return 2 * L * L; }
  std::int8_t& at(int a, std::size_t e) { return spins[static_cast<std::size_t>(a) * n() + e]; }
  std::int8_t at(int a, std::size_t e) const { return spins[static_cast<std::size_t>(a) * n() + e]; }
  int plaquette(int a, std::size_t p) const {
    const ToricLattice lat(L);
    int u = 1;
    for (auto e : lat.plaquette_edges(p)) u *= at(a, e);
    return u;
  }
};

namespace detail {

// ln(1 + tanh(beta)^{n/2}).
inline double third_term_weight(double beta, std::size_t n) {
  return std::log1p(std::pow(std::tanh(beta), static_cast<double>(n) / 2.0));
}

}  // namespace detail

// H = -sum_a [ h sum_e eta_e^a + (1/2) ln cosh(beta) sum_p U_p^a U_p^{a+1}
//             + ln(1 + tanh(beta)^{n/2} prod_p delta(U_p^a, U_p^{a+1})) ],
// with replica R+1 identified with replica 1.
inline double replica_energy(const ReplicaSpinConfig& cfg, double beta, double h,
                             bool include_third_term = true) {
  const std::size_t n = cfg.n();
  const std::size_t P = cfg.L * cfg.L;
  const double J = 0.5 * std::log(std::cosh(beta));
  const double T = detail::third_term_weight(beta, n);
  double H = 0.0;
  for (int a = 0; a < cfg.R; ++a) {
    const int b = (a + 1) % cfg.R;
    double field = 0.0;
    for (std::size_t e = 0; e < n; ++e) field += cfg.at(a, e);
    double coupling = 0.0;
    bool match = true;
    for (std::size_t p = 0; p < P; ++p) {
      const int ua = cfg.plaquette(a, p);
      const int ub = cfg.plaquette(b, p);
      coupling += ua * ub;
      match = match && ua == ub;
    }
    H -= h * field + J * coupling;
    if (include_third_term && match) H -= T;
  }
  return H;
}

// The observable prod_{a, l} (1 + prod_{e in l} eta^a eta^{a+1}) / 2 over the
// two Z loops; it is 1 exactly when every replica has the same loop parities.
inline double replica_observable(const ReplicaSpinConfig& cfg) {
  const ToricLattice lat(cfg.L);
  double o = 1.0;
  for (int a = 0; a < cfg.R; ++a) {
    const int b = (a + 1) % cfg.R;
    for (int which : {1, 2}) {
      int prod = 1;
      for (auto e : lat.z_loop(which)) prod *= cfg.at(a, e) * cfg.at(b, e);
      o *= (1.0 + prod) / 2.0;
    }
  }
  return o;
}

// Incrementally maintained replica configuration: integer field and coupling
// sums, plaquette mismatch counts per replica pair and loop parities, so a
// flip costs O(1) and the energy is recomputed exactly from integers.
class ReplicaState {
 public:
  ReplicaState(std::size_t L, int R, double beta, double h, bool third_term)
      : cfg_(L, R), lat_(L), beta_(beta), h_(h), third_(third_term) {
    const std::size_t n = cfg_.n();
    const std::size_t P = L * L;
    J_ = 0.5 * std::log(std::cosh(beta));
    T_ = detail::third_term_weight(beta, n);
    edge_plaq_.assign(n, {});
    for (std::size_t p = 0; p < P; ++p) {
      for (auto e : lat_.plaquette_edges(p)) edge_plaq_[e].push_back(p);
    }
    on_loop_.assign(n, 0);
    for (auto e : lat_.z_loop(1)) on_loop_[e] |= 1;
    for (auto e : lat_.z_loop(2)) on_loop_[e] |= 2;
    U_.assign(static_cast<std::size_t>(R) * P, 1);
    mismatch_.assign(static_cast<std::size_t>(R), 0);
    loop_parity_.assign(static_cast<std::size_t>(R), 0);
    field_sum_ = static_cast<long>(R) * static_cast<long>(n);
    coupling_sum_ = static_cast<long>(R) * static_cast<long>(P);
  }

  const ReplicaSpinConfig& config() const { return cfg_; }
  int R() const { return cfg_.R; }
  std::size_t n() const { return cfg_.n(); }

  double energy() const {
    double H = -(h_ * static_cast<double>(field_sum_) + J_ * static_cast<double>(coupling_sum_));
    if (third_) {
      for (int m : mismatch_) H -= m == 0 ? T_ : 0.0;
    }
    return H;
  }

  // 1 when all replicas share both loop parities, else 0.
  double observable() const {
    for (int a = 1; a < cfg_.R; ++a) {
      if (loop_parity_[static_cast<std::size_t>(a)] != loop_parity_[0]) return 0.0;
    }
    return 1.0;
  }

  // Energy change of flipping eta_e^a, without applying it.
  double delta(int a, std::size_t e) const {
    const int s = cfg_.at(a, e);
    const int up = (a + 1) % cfg_.R;
    const int dn = (a + cfg_.R - 1) % cfg_.R;
    long dc = 0;
    int dm_up = 0;
    int dm_dn = 0;
    for (auto p : edge_plaq_[e]) {
      const int u = U(a, p);
      const int uu = U(up, p);
      const int ud = U(dn, p);
      dc -= 2L * u * (uu + ud);
      dm_up += u == uu ? 1 : -1;
      dm_dn += u == ud ? 1 : -1;
    }
    double dH = 2.0 * h_ * s - J_ * static_cast<double>(dc);
    if (third_) {
      const int pa = a;
      const int pd = dn;
      dH -= term(mismatch_[static_cast<std::size_t>(pa)] + dm_up) - term(mismatch_[static_cast<std::size_t>(pa)]);
      dH -= term(mismatch_[static_cast<std::size_t>(pd)] + dm_dn) - term(mismatch_[static_cast<std::size_t>(pd)]);
    }
    return dH;
  }

  void flip(int a, std::size_t e) {
    const int up = (a + 1) % cfg_.R;
    const int dn = (a + cfg_.R - 1) % cfg_.R;
    auto& s = cfg_.at(a, e);
    field_sum_ -= 2 * s;
    s = static_cast<std::int8_t>(-s);
    for (auto p : edge_plaq_[e]) {
      int& u = U(a, p);
      const int uu = U(up, p);
      const int ud = U(dn, p);
      // Pair a compares a with a+1; pair a-1 compares a-1 with a.
      mismatch_[static_cast<std::size_t>(a)] += u == uu ? 1 : -1;
      mismatch_[static_cast<std::size_t>(dn)] += u == ud ? 1 : -1;
      coupling_sum_ -= 2L * u * (uu + ud);
      u = -u;
    }
    loop_parity_[static_cast<std::size_t>(a)] ^= on_loop_[e];
  }

 private:
  int& U(int a, std::size_t p) { return U_[static_cast<std::size_t>(a) * lat_.size() * lat_.size() + p]; }
  int U(int a, std::size_t p) const { return U_[static_cast<std::size_t>(a) * lat_.size() * lat_.size() + p]; }
  double term(int mismatches) const { return mismatches == 0 ? T_ : 0.0; }

  ReplicaSpinConfig cfg_;
  ToricLattice lat_;
  double beta_;
  double h_;
  bool third_;
  double J_ = 0.0;
  double T_ = 0.0;
  std::vector<std::vector<std::size_t>> edge_plaq_;
  std::vector<std::uint8_t> on_loop_;
  std::vector<int> U_;
  std::vector<int> mismatch_;
  std::vector<std::uint8_t> loop_parity_;
  long field_sum_ = 0;
  long coupling_sum_ = 0;
};

inline constexpr std::size_t kMaxExactSpins = 24;

// S^(R) = (1/(1-R)) ln <O> by enumerating every spin configuration, third
// term included.
inline double renyi_entropy_exact(const ImperfectPrep& prep) {
  prep.validate();
  const std::size_t spins = static_cast<std::size_t>(prep.R) * prep.n();
  if (spins > kMaxExactSpins) {
    throw BudgetError(std::to_string(spins) + " replica spins exceed the enumeration limit");
  }
  ReplicaState st(prep.L, prep.R, prep.beta, prep.h(), true);
  LogAccumulator all;
  LogAccumulator obs;
  const std::uint64_t count = std::uint64_t{1} << spins;
  const std::size_t n = prep.n();
  for (std::uint64_t t = 0; t < count; ++t) {
    if (t > 0) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(t));
      st.flip(static_cast<int>(bit / n), bit % n);
    }
    const double lw = -st.energy();
    all.add(lw);
    if (st.observable() > 0.0) obs.add(lw);
  }
  return (obs.value() - all.value()) / (1.0 - prep.R);
}

// Two-replica shortcut: with tau = eta^1 eta^2 the field sums out, leaving
// independent flips of rate q = 2p(1-p) weighted by
// exp(2J sum_p V_p) (1 + tanh(beta)^{n/2} [all V_p = 1])^2, V_p the
// plaquette product of tau. Enumerates 2^n configurations.
inline double renyi2_marginal_exact(std::size_t L, double beta, double p) {
  const ToricLattice lat(L);
  const std::size_t n = lat.num_edges();
  if (n > kMaxExactSpins) throw BudgetError("marginal enumeration beyond limit");
  const double q = 2.0 * p * (1.0 - p);
  const double J = 0.5 * std::log(std::cosh(beta));
  const double T = detail::third_term_weight(beta, n);
  std::vector<std::uint64_t> pmask(L * L);
  for (std::size_t pl = 0; pl < pmask.size(); ++pl) {
    for (auto e : lat.plaquette_edges(pl)) pmask[pl] |= std::uint64_t{1} << e;
  }
  std::uint64_t l1 = 0;
  std::uint64_t l2 = 0;
  for (auto e : lat.z_loop(1)) l1 |= std::uint64_t{1} << e;
  for (auto e : lat.z_loop(2)) l2 |= std::uint64_t{1} << e;
  LogAccumulator all;
  LogAccumulator obs;
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
    const int flips = std::popcount(t);
    int unsat = 0;
    for (auto m : pmask) unsat += std::popcount(t & m) & 1;
    double lw = flips * std::log(q) + static_cast<double>(static_cast<int>(n) - flips) * std::log1p(-q) +
                2.0 * J * static_cast<double>(static_cast<int>(pmask.size()) - 2 * unsat);
    if (unsat == 0) lw += 2.0 * T;
    all.add(lw);
    if ((std::popcount(t & l1) & 1) == 0 && (std::popcount(t & l2) & 1) == 0) obs.add(lw);
  }
  return -(obs.value() - all.value());
}

struct RenyiMcOptions {
  std::uint64_t sweeps = 100000;  // measurement sweeps summed over chains
  std::uint64_t burn_in = 1000;   // per chain
  std::size_t chains = 4;
  std::size_t bins_per_chain = 32;
  bool include_third_term = true;
  std::uint64_t seed = 1;
};

struct RenyiMcResult {
  double S = 0.0;
  double S_err = 0.0;
  double mean_observable = 0.0;
  double observable_err = 0.0;
  bool lower_bound = false;  // <O> within 2 sigma of zero
  double tau_int = 0.0;      // integrated autocorrelation time, sweeps
  bool converged = true;     // tau_int small against the bin length
  std::uint64_t sweeps = 0;
  std::uint64_t seed = 0;
  double acceptance = 0.0;
};

// Metropolis single-spin flips with sequential sweeps over replicas and
// edges; one measurement per sweep. Chains start from the all-up state with
// seeds derived from (seed, chain), and their bins are combined in chain
// order, so results do not depend on the thread count. Errors are
// jackknife estimates over all bins.
inline RenyiMcResult renyi_entropy_mc(const ImperfectPrep& prep, const RenyiMcOptions& opt,
                                      std::size_t threads = 1) {
  prep.validate();
  if (opt.chains == 0 || opt.bins_per_chain == 0) throw ConfigError("need at least one chain and bin");
  const std::uint64_t per_chain = opt.sweeps / opt.chains;
  const std::uint64_t bin_len = per_chain / opt.bins_per_chain;
  if (bin_len == 0) throw ConfigError("too few sweeps for the requested bins");
  const std::size_t nb = opt.bins_per_chain;
  std::vector<double> bins(opt.chains * nb, 0.0);
  std::vector<double> sumsq(opt.chains, 0.0);
  std::vector<std::uint64_t> accepted(opt.chains, 0);
  parallel_for(opt.chains, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      Rng rng = stream_rng(opt.seed, c);
      ReplicaState st(prep.L, prep.R, prep.beta, prep.h(), opt.include_third_term);
      const std::size_t n = st.n();
      auto sweep = [&] {
        for (int a = 0; a < st.R(); ++a) {
          for (std::size_t e = 0; e < n; ++e) {
            const double dH = st.delta(a, e);
            if (dH <= 0.0 || uniform01(rng) < std::exp(-dH)) {
              st.flip(a, e);
              ++accepted[c];
            }
          }
        }
      };
      for (std::uint64_t s = 0; s < opt.burn_in; ++s) sweep();
      accepted[c] = 0;
      for (std::size_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (std::uint64_t s = 0; s < bin_len; ++s) {
          sweep();
          const double o = st.observable();
          acc += o;
          sumsq[c] += o * o;
        }
        bins[c * nb + b] = acc / static_cast<double>(bin_len);
      }
    }
  });

  RenyiMcResult r;
  r.seed = opt.seed;
  r.sweeps = bin_len * nb * opt.chains;
  const auto B = static_cast<double>(bins.size());
  double total = 0.0;
  for (double b : bins) total += b;
  const double mean = total / B;
  r.mean_observable = mean;
  const double inv = 1.0 / (1.0 - prep.R);
  r.S = mean > 0.0 ? inv * std::log(mean) : std::numeric_limits<double>::infinity();
  // Jackknife over bins.
  double var_o = 0.0;
  double var_s = 0.0;
  double mean_s = 0.0;
  std::vector<double> s_jk(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double m = (total - bins[i]) / (B - 1.0);
    s_jk[i] = m > 0.0 ? inv * std::log(m) : std::numeric_limits<double>::infinity();
    mean_s += s_jk[i] / B;
  }
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double m = (total - bins[i]) / (B - 1.0);
    var_o += (m - mean) * (m - mean);
    var_s += (s_jk[i] - mean_s) * (s_jk[i] - mean_s);
  }
  r.observable_err = std::sqrt((B - 1.0) / B * var_o);
  r.S_err = std::sqrt((B - 1.0) / B * var_s);
  r.lower_bound = mean <= 2.0 * r.observable_err;
  // tau_int from the ratio of bin-mean variance to single-sweep variance.
  double sq = 0.0;
  for (double s : sumsq) sq += s;
  const double N = static_cast<double>(r.sweeps);
  const double single_var = sq / N - mean * mean;
  double bin_var = 0.0;
  for (double b : bins) bin_var += (b - mean) * (b - mean);
  bin_var /= B - 1.0;
  r.tau_int = single_var > 0.0 ? 0.5 * bin_var * static_cast<double>(bin_len) / single_var : 0.0;
  r.converged = r.tau_int * 20.0 < static_cast<double>(bin_len);
  std::uint64_t acc_total = 0;
  for (auto a : accepted) acc_total += a;
  r.acceptance = static_cast<double>(acc_total) / (N * static_cast<double>(prep.R * prep.n()));
  return r;
}

// sqrt(n/2) / (1 - 1/R) * exp(-2h - 4 beta).
inline double perturbative_prediction(double n, double beta, double h, int R) {
  if (R < 2) throw DegenerateInputError("perturbative prediction needs R >= 2");
  return std::sqrt(n / 2.0) / (1.0 - 1.0 / R) * std::exp(-2.0 * h - 4.0 * beta);
}

}  // namespace aqec
