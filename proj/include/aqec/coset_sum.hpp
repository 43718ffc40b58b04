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

// Exact coset sums Z(eta) = sum_{m in M} Pr(eta + m) for product Weyl
// channels. Only the part of M that keeps every site inside the span of its
// positive-probability labels (the sector W) can contribute, so sums run over
// M cap W. Two evaluators share one plan: a modular Gray-code walk (one basis
// vector added per step) and a variable-elimination contraction whose cost is
// exponential only in the elimination width.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqec/codes.hpp"
#include "aqec/error.hpp"
#include "aqec/fields.hpp"
#include "aqec/noise.hpp"
#include "aqec/rng.hpp"

namespace aqec {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log(sum exp(x_i)).
class LogAccumulator {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (ref_ == kNegInf) {
      ref_ = x;
      acc_ = 1.0;
    } else if (x <= ref_) {
      acc_ += std::exp(x - ref_);
    } else {
      acc_ = acc_ * std::exp(ref_ - x) + 1.0;
      ref_ = x;
    }
  }
  double value() const { return ref_ == kNegInf ? kNegInf : ref_ + std::log(acc_); }

 private:
  double ref_ = kNegInf;
  double acc_ = 0.0;
};

enum class CosetMethod { kAuto, kGray, kElimination };

struct SiteDelta {
  std::uint32_t site;
  std::uint8_t dx;
  std::uint8_t dz;
};

// Structure of M cap W and the class offsets, independent of eta.
class SectorPlan {
 public:
  SectorPlan(const StabilizerCode& code, const WeylChannel& ch) : n_(code.n()), d_(code.d()) {
    if (ch.n() != n_ || ch.d() != d_) throw DimensionError("channel does not match code");
    const std::uint32_t d = d_;
    log_tables_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      log_tables_[i].resize(static_cast<std::size_t>(d) * d);
      for (std::size_t l = 0; l < log_tables_[i].size(); ++l) {
        const double p = ch.site(i)[l];
        log_tables_[i][l] = p > 0.0 ? std::log(p) : kNegInf;
      }
    }

    // Per-site span of the support and its local symplectic complement.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> span(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto sup = ch.support(i);
      detail::ModMatrix m(sup.size(), 2, d);
      for (std::size_t r = 0; r < sup.size(); ++r) {
        m.at(r, 0) = sup[r].first;
        m.at(r, 1) = sup[r].second;
      }
      const auto piv = m.rref();
      for (std::size_t r = 0; r < piv.size(); ++r) span[i].emplace_back(m.at(r, 0), m.at(r, 1));
      if (piv.empty()) {
        perp_.push_back({static_cast<std::uint32_t>(i), 1, 0});
        perp_.push_back({static_cast<std::uint32_t>(i), 0, 1});
      } else if (piv.size() == 1) {
        perp_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(span[i][0].first),
                         static_cast<std::uint8_t>(span[i][0].second)});
      }
    }

    const auto& gens = code.generators();
    detail::ModMatrix a(perp_.size(), gens.size(), d);
    for (std::size_t r = 0; r < perp_.size(); ++r) {
      for (std::size_t j = 0; j < gens.size(); ++j) a.at(r, j) = local_form(gens[j], perp_[r]);
    }
    std::vector<SympVector> inter;
    for (const auto& c : a.nullspace()) {
      SympVector v = code.zero();
      for (std::size_t j = 0; j < gens.size(); ++j) v.add_scaled(gens[j], c[j]);
      inter.push_back(std::move(v));
    }
    intersection_ = rref(std::span<const SympVector>(inter), n_, d);
    // The walk and the contraction use the generator-level basis: it is as
    // sparse as the generators, while the echelon basis is not.
    sparse_basis_ = std::move(inter);
    for (const auto& b : sparse_basis_) {
      std::vector<SiteDelta> delta;
      for (std::size_t i = 0; i < n_; ++i) {
        if (b.x(i) != 0 || b.z(i) != 0) {
          delta.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(b.x(i)),
                           static_cast<std::uint8_t>(b.z(i))});
        }
      }
      deltas_.push_back(std::move(delta));
    }

    generators_ = gens;
    constraints_ = a;

    // Offsets o_c in (l_c + M) cap W for every relative class c.
    const std::size_t classes = code.num_classes();
    offsets_.resize(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      offsets_[c] = shift_into_sector(code.logical_vector(code.class_coeffs(c)));
    }

    // A complement of M cap W inside W, for enumerating W / (M cap W).
    std::vector<SympVector> chosen = intersection_.basis();
    Subspace current = intersection_;
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& [x, z] : span[i]) {
        SympVector v = code.zero();
        v.set_x(i, x);
        v.set_z(i, z);
        if (current.contains(v)) continue;
        chosen.push_back(v);
        quotient_basis_.push_back(v);
        current = rref(std::span<const SympVector>(chosen), n_, d);
      }
    }
  }

  std::size_t n() const { return n_; }
  std::uint32_t d() const { return d_; }
  std::size_t rank() const { return intersection_.rank(); }
  const Subspace& intersection() const { return intersection_; }
  const std::vector<SympVector>& sparse_basis() const { return sparse_basis_; }
  const std::vector<std::vector<SiteDelta>>& deltas() const { return deltas_; }
  const std::vector<std::optional<SympVector>>& offsets() const { return offsets_; }
  const std::vector<SympVector>& quotient_basis() const { return quotient_basis_; }
  double log_site(std::size_t i, std::uint32_t x, std::uint32_t z) const {
    return log_tables_[i][x * d_ + z];
  }

  // Some v + m in W with m in M, or nullopt when the coset misses W.
  std::optional<SympVector> shift_into_sector(const SympVector& v) const {
    std::vector<std::uint32_t> rhs(perp_.size());
    for (std::size_t r = 0; r < perp_.size(); ++r) rhs[r] = (d_ - local_form(v, perp_[r])) % d_;
    const auto sol = constraints_.solve(rhs);
    if (!sol) return std::nullopt;
    SympVector o = v;
    for (std::size_t j = 0; j < generators_.size(); ++j) o.add_scaled(generators_[j], (*sol)[j]);
    return o;
  }

  bool in_sector(const SympVector& v) const {
    for (const auto& w : perp_) {
      if (local_form(v, w) != 0) return false;
    }
    return true;
  }

 private:
  std::uint32_t local_form(const SympVector& v, const SiteDelta& w) const {
    const std::uint32_t i = w.site;
    return (v.x(i) * w.dz + (d_ - v.z(i)) * w.dx) % d_;
  }

  std::size_t n_;
  std::uint32_t d_;
  std::vector<std::vector<double>> log_tables_;
  std::vector<SiteDelta> perp_;  // (site, w) constraints defining W
  std::vector<SympVector> generators_;
  detail::ModMatrix constraints_{0, 0, 2};
  Subspace intersection_;
  std::vector<SympVector> sparse_basis_;
  std::vector<std::vector<SiteDelta>> deltas_;
  std::vector<std::optional<SympVector>> offsets_;
  std::vector<SympVector> quotient_basis_;
};

// log sum_{m in M cap W} Pr(v + m) by a modular Gray-code walk: at step t the
// coefficient of basis vector nu_d(t) increases by one, so exactly one basis
// vector is added per step.
inline double gray_log_coset_sum(const SectorPlan& plan, const SympVector& v,
                                 std::uint64_t budget = std::uint64_t{1} << 26) {
  const std::uint32_t d = plan.d();
  const std::size_t n = plan.n();
  const std::size_t r = plan.rank();
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < r; ++j) {
    count *= d;
    if (count > budget) throw BudgetError("coset of rank " + std::to_string(r) + " exceeds budget");
  }
  std::vector<std::uint8_t> x(n);
  std::vector<std::uint8_t> z(n);
  double lp = 0.0;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<std::uint8_t>(v.x(i));
    z[i] = static_cast<std::uint8_t>(v.z(i));
    const double s = plan.log_site(i, x[i], z[i]);
    if (s == kNegInf) {
      ++zeros;
    } else {
      lp += s;
    }
  }
  LogAccumulator acc;
  if (zeros == 0) acc.add(lp);
  for (std::uint64_t t = 1; t < count; ++t) {
    std::uint64_t u = t;
    std::size_t j = 0;
    while (u % d == 0) {
      u /= d;
      ++j;
    }
    for (const auto& sd : plan.deltas()[j]) {
      const std::uint32_t i = sd.site;
      const double before = plan.log_site(i, x[i], z[i]);
      x[i] = static_cast<std::uint8_t>((x[i] + sd.dx) % d);
      z[i] = static_cast<std::uint8_t>((z[i] + sd.dz) % d);
      const double after = plan.log_site(i, x[i], z[i]);
      if (before == kNegInf) {
        --zeros;
      } else {
        lp -= before;
      }
      if (after == kNegInf) {
        ++zeros;
      } else {
        lp += after;
      }
    }
    if (zeros == 0) acc.add(lp);
  }
  return acc.value();
}

// Variable-elimination contraction of the same sum. Variables are the
// coefficients of the M cap W basis; each touched site is a factor over the
// variables whose basis vectors act on it.
class EliminationPlan {
 public:
  explicit EliminationPlan(const SectorPlan& plan,
                           std::uint64_t max_table = std::uint64_t{1} << 22)
      : d_(plan.d()), n_(plan.n()) {
    const std::size_t r = plan.rank();
    std::vector<std::vector<std::uint32_t>> site_vars(n_);
    for (std::size_t j = 0; j < r; ++j) {
      for (const auto& sd : plan.deltas()[j]) site_vars[sd.site].push_back(static_cast<std::uint32_t>(j));
    }
    std::vector<std::vector<std::uint32_t>> scopes;  // scope of every slot
    for (std::size_t i = 0; i < n_; ++i) {
      if (site_vars[i].empty()) {
        free_sites_.push_back(static_cast<std::uint32_t>(i));
        continue;
      }
      SiteFactor f;
      f.site = static_cast<std::uint32_t>(i);
      for (auto j : site_vars[i]) {
        const auto& b = plan.sparse_basis()[j];
        f.dx.push_back(static_cast<std::uint8_t>(b.x(i)));
        f.dz.push_back(static_cast<std::uint8_t>(b.z(i)));
      }
      f.size = table_size(site_vars[i].size(), max_table);
      site_factors_.push_back(std::move(f));
      scopes.push_back(site_vars[i]);
    }

    const auto order_vars = choose_order(scopes, r);
    std::vector<bool> alive(scopes.size(), true);
    for (std::size_t step = 0; step < r; ++step) {
      const std::size_t best = order_vars[step];
      const auto var = static_cast<std::uint32_t>(best);
      Step st;
      std::vector<std::uint32_t> uni;
      for (std::size_t s = 0; s < scopes.size(); ++s) {
        if (!alive[s] || !std::ranges::binary_search(scopes[s], var)) continue;
        st.inputs.push_back(s);
        alive[s] = false;
        for (auto u : scopes[s]) {
          if (u != var) uni.push_back(u);
        }
      }
      std::ranges::sort(uni);
      uni.erase(std::ranges::unique(uni).begin(), uni.end());
      // The eliminated variable is the fastest digit of the union index.
      std::vector<std::uint32_t> order{var};
      order.insert(order.end(), uni.begin(), uni.end());
      st.digits = order.size();
      st.union_size = table_size(order.size(), max_table);
      for (auto s : st.inputs) {
        std::vector<std::uint64_t> strides(order.size(), 0);
        std::uint64_t stride = 1;
        for (auto u : scopes[s]) {
          const auto pos = std::ranges::find(order, u) - order.begin();
          strides[static_cast<std::size_t>(pos)] = stride;
          stride *= d_;
        }
        st.strides.push_back(std::move(strides));
      }
      max_width_ = std::max(max_width_, order.size());
      st.output = scopes.size();
      scopes.push_back(uni);
      alive.push_back(true);
      steps_.push_back(std::move(st));
    }
    for (std::size_t s = 0; s < scopes.size(); ++s) {
      if (alive[s]) final_slots_.push_back(s);
    }
    num_slots_ = scopes.size();
  }

  std::size_t max_width() const { return max_width_; }

  // log of the coset sum at v. `scratch` holds one table per slot and is
  // reused between calls.
  double log_sum(const SectorPlan& plan, const SympVector& v,
                 std::vector<std::vector<double>>& scratch) const {
    scratch.resize(num_slots_);
    double log_scale = 0.0;
    for (auto i : free_sites_) {
      const double s = plan.log_site(i, v.x(i), v.z(i));
      if (s == kNegInf) return kNegInf;
      log_scale += s;
    }
    for (std::size_t f = 0; f < site_factors_.size(); ++f) {
      const auto& sf = site_factors_[f];
      auto& table = scratch[f];
      table.resize(sf.size);
      std::uint32_t x = v.x(sf.site);
      std::uint32_t z = v.z(sf.site);
      std::vector<std::uint32_t> digit(sf.dx.size(), 0);
      double peak = 0.0;
      for (std::uint64_t a = 0; a < sf.size; ++a) {
        const double lp = plan.log_site(sf.site, x, z);
        table[a] = lp == kNegInf ? 0.0 : std::exp(lp);
        peak = std::max(peak, table[a]);
        for (std::size_t t = 0; t < digit.size(); ++t) {
          x = (x + sf.dx[t]) % d_;
          z = (z + sf.dz[t]) % d_;
          if (++digit[t] < d_) break;
          digit[t] = 0;
        }
      }
      if (peak == 0.0) return kNegInf;
      for (auto& e : table) e /= peak;
      log_scale += std::log(peak);
    }
    std::vector<std::uint32_t> digit;
    std::vector<std::uint64_t> idx;
    for (const auto& st : steps_) {
      auto& out = scratch[st.output];
      out.assign(st.union_size / d_, 0.0);
      digit.assign(st.digits, 0);
      idx.assign(st.inputs.size(), 0);
      const std::size_t k = st.inputs.size();
      for (std::uint64_t u = 0; u < st.union_size; ++u) {
        double prod = 1.0;
        for (std::size_t f = 0; f < k; ++f) prod *= scratch[st.inputs[f]][idx[f]];
        out[u / d_] += prod;
        for (std::size_t t = 0; t < st.digits; ++t) {
          if (++digit[t] < d_) {
            for (std::size_t f = 0; f < k; ++f) idx[f] += st.strides[f][t];
            break;
          }
          digit[t] = 0;
          for (std::size_t f = 0; f < k; ++f) idx[f] -= (d_ - 1) * st.strides[f][t];
        }
      }
      const double peak = *std::ranges::max_element(out);
      if (peak == 0.0) return kNegInf;
      for (auto& e : out) e /= peak;
      log_scale += std::log(peak);
    }
    for (auto s : final_slots_) {
      // Only scalars remain once every variable is eliminated.
      const double val = scratch[s][0];
      if (val == 0.0) return kNegInf;
      log_scale += std::log(val);
    }
    return log_scale;
  }

 private:
  struct SiteFactor {
    std::uint32_t site = 0;
    std::vector<std::uint8_t> dx;
    std::vector<std::uint8_t> dz;
    std::uint64_t size = 1;
  };
  struct Step {
    std::vector<std::size_t> inputs;
    std::vector<std::vector<std::uint64_t>> strides;
    std::size_t digits = 0;
    std::uint64_t union_size = 1;
    std::size_t output = 0;
  };

  // Greedy elimination orders on the interaction graph (minimum degree,
  // minimum fill, and minimum fill with seeded tie-breaking); the one with
  // the smallest total table volume wins.
  std::vector<std::size_t> choose_order(const std::vector<std::vector<std::uint32_t>>& scopes,
                                        std::size_t r) const {
    std::vector<std::vector<bool>> adj0(r, std::vector<bool>(r, false));
    for (const auto& sc : scopes) {
      for (auto a : sc) {
        for (auto b : sc) {
          if (a != b) adj0[a][b] = true;
        }
      }
    }
    std::vector<std::size_t> best_order;
    double best_cost = std::numeric_limits<double>::infinity();
    constexpr int kTrials = 24;
    for (int trial = 0; trial < kTrials; ++trial) {
      const bool use_fill = trial != 0;
      Rng rng(derive_seed(0x5eed, static_cast<std::uint64_t>(trial)));
      auto adj = adj0;
      std::vector<bool> done(r, false);
      std::vector<std::size_t> order;
      double cost = 0.0;
      for (std::size_t step = 0; step < r; ++step) {
        std::size_t pick = r;
        std::size_t pick_key = std::numeric_limits<std::size_t>::max();
        std::uint64_t pick_tie = 0;
        for (std::size_t v = 0; v < r; ++v) {
          if (done[v]) continue;
          std::vector<std::size_t> nb;
          for (std::size_t u = 0; u < r; ++u) {
            if (!done[u] && adj[v][u]) nb.push_back(u);
          }
          std::size_t key = nb.size();
          if (use_fill) {
            key = 0;
            for (std::size_t a = 0; a < nb.size(); ++a) {
              for (std::size_t b = a + 1; b < nb.size(); ++b) key += adj[nb[a]][nb[b]] ? 0 : 1;
            }
          }
          const std::uint64_t tie = trial <= 1 ? v : rng();
          if (key < pick_key || (key == pick_key && tie < pick_tie)) {
            pick = v;
            pick_key = key;
            pick_tie = tie;
          }
        }
        std::vector<std::size_t> nb;
        for (std::size_t u = 0; u < r; ++u) {
          if (!done[u] && adj[pick][u]) nb.push_back(u);
        }
        for (auto a : nb) {
          for (auto b : nb) {
            if (a != b) adj[a][b] = true;
          }
        }
        cost += std::pow(static_cast<double>(d_), static_cast<double>(nb.size() + 1));
        done[pick] = true;
        order.push_back(pick);
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_order = std::move(order);
      }
    }
    return best_order;
  }

  std::uint64_t table_size(std::size_t vars, std::uint64_t max_table) const {
    std::uint64_t s = 1;
    for (std::size_t t = 0; t < vars; ++t) {
      s *= d_;
      if (s > max_table) throw BudgetError("elimination width " + std::to_string(vars) + " exceeds budget");
    }
    return s;
  }

  std::uint32_t d_;
  std::size_t n_;
  std::vector<std::uint32_t> free_sites_;
  std::vector<SiteFactor> site_factors_;
  std::vector<Step> steps_;
  std::vector<std::size_t> final_slots_;
  std::size_t num_slots_ = 0;
  std::size_t max_width_ = 0;
};

}  // namespace aqec
