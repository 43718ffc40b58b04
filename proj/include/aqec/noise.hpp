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

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqec/error.hpp"
#include "aqec/fields.hpp"
#include "aqec/rng.hpp"

namespace aqec {

// Stochastic Weyl channel with independent sites: Pr(eta) = prod_i P_i(x_i, z_i).
// Site tables are indexed by x * d + z.
class WeylChannel {
 public:
  WeylChannel(std::size_t n, std::uint32_t d,
              std::vector<std::vector<double>> site_tables, std::string name = "custom")
      : n_(n), d_(d), tables_(std::move(site_tables)), name_(std::move(name)) {
    require_prime(d);
    if (tables_.size() != n) throw ValidationError("need one site table per qudit");
    for (const auto& t : tables_) {
      if (t.size() != static_cast<std::size_t>(d) * d) {
        throw ValidationError("site table must have d^2 entries");
      }
      double sum = 0.0;
      for (double v : t) {
        if (!(v >= 0.0)) throw ValidationError("negative site probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("site table does not sum to 1");
    }
    homogeneous_ = true;
    for (const auto& t : tables_) homogeneous_ = homogeneous_ && t == tables_.front();
    cumulative_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (double v : tables_[i]) {
        acc += v;
        cumulative_[i].push_back(acc);
      }
    }
  }

  static WeylChannel iid(std::size_t n, std::uint32_t d, const std::vector<double>& table,
                         std::string name) {
    return WeylChannel(n, d, std::vector<std::vector<double>>(n, table), std::move(name));
  }

  std::size_t n() const { return n_; }
  std::uint32_t d() const { return d_; }
  const std::string& name() const { return name_; }
  bool homogeneous() const { return homogeneous_; }
  const std::vector<double>& site(std::size_t i) const { return tables_[i]; }
  double label_prob(std::size_t i, std::uint32_t x, std::uint32_t z) const {
    return tables_[i][x * d_ + z];
  }

  double prob(const SympVector& eta) const {
    check(eta);
    double p = 1.0;
    for (std::size_t i = 0; i < n_; ++i) p *= label_prob(i, eta.x(i), eta.z(i));
    return p;
  }
  double log_prob(const SympVector& eta) const {
    check(eta);
    double lp = 0.0;
    for (std::size_t i = 0; i < n_; ++i) lp += std::log(label_prob(i, eta.x(i), eta.z(i)));
    return lp;
  }

  SympVector sample(Rng& rng) const {
    SympVector eta(n_, d_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double u = uniform01(rng);
      const auto& cum = cumulative_[i];
      std::size_t label = cum.size();
      std::size_t last_positive = 0;
      for (std::size_t l = 0; l < cum.size(); ++l) {
        if (tables_[i][l] == 0.0) continue;
        last_positive = l;
        if (u < cum[l]) {
          label = l;
          break;
        }
      }
      if (label == cum.size()) label = last_positive;  // u beyond rounded total
      eta.set_x(i, static_cast<std::uint32_t>(label / d_));
      eta.set_z(i, static_cast<std::uint32_t>(label % d_));
    }
    return eta;
  }

  // Labels with positive probability at site i, in table order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> support(std::size_t i) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t l = 0; l < d_ * d_; ++l) {
      if (tables_[i][l] > 0.0) out.emplace_back(l / d_, l % d_);
    }
    return out;
  }

  void check(const SympVector& eta) const {
    if (eta.n() != n_ || eta.d() != d_) throw DimensionError("error label does not match channel");
  }

 private:
  std::size_t n_;
  std::uint32_t d_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<double>> cumulative_;
  std::string name_;
  bool homogeneous_ = true;
};

namespace detail {
inline void check_rate(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("error rate outside [0, 1]");
}
}  // namespace detail

// X^a, a != 0, with total probability p spread evenly.
inline WeylChannel bit_flip(std::size_t n, double p, std::uint32_t d = 2) {
  detail::check_rate(p);
  std::vector<double> t(static_cast<std::size_t>(d) * d, 0.0);
  t[0] = 1.0 - p;
  for (std::uint32_t x = 1; x < d; ++x) t[x * d] = p / (d - 1);
  return WeylChannel::iid(n, d, t, "bit_flip");
}

inline WeylChannel phase_flip(std::size_t n, double p, std::uint32_t d = 2) {
  detail::check_rate(p);
  std::vector<double> t(static_cast<std::size_t>(d) * d, 0.0);
  t[0] = 1.0 - p;
  for (std::uint32_t z = 1; z < d; ++z) t[z] = p / (d - 1);
  return WeylChannel::iid(n, d, t, "phase_flip");
}

// Every non-identity label with probability p / (d^2 - 1).
inline WeylChannel depolarizing(std::size_t n, double p, std::uint32_t d = 2) {
  detail::check_rate(p);
  const std::size_t m = static_cast<std::size_t>(d) * d;
  std::vector<double> t(m, p / static_cast<double>(m - 1));
  t[0] = 1.0 - p;
  return WeylChannel::iid(n, d, t, "depolarizing");
}

// Independent X and Z components with rates px and pz.
inline WeylChannel independent_xz(std::size_t n, double px, double pz, std::uint32_t d = 2) {
  detail::check_rate(px);
  detail::check_rate(pz);
  std::vector<double> t(static_cast<std::size_t>(d) * d, 0.0);
  for (std::uint32_t x = 0; x < d; ++x) {
    for (std::uint32_t z = 0; z < d; ++z) {
      const double fx = x == 0 ? 1.0 - px : px / (d - 1);
      const double fz = z == 0 ? 1.0 - pz : pz / (d - 1);
      t[x * d + z] = fx * fz;
    }
  }
  return WeylChannel::iid(n, d, t, "independent_xz");
}

enum class NoiseKind { kBitFlip, kPhaseFlip, kDepolarizing, kIndependentXZ };

// A one-parameter channel family, instantiated per code size and rate.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kBitFlip;
  double p = 0.0;
  double pz = 0.0;  // only for kIndependentXZ, where p is the X rate

  WeylChannel make(std::size_t n, std::uint32_t d = 2) const {
    switch (kind) {
      case NoiseKind::kBitFlip: return bit_flip(n, p, d);
      case NoiseKind::kPhaseFlip: return phase_flip(n, p, d);
      case NoiseKind::kDepolarizing: return depolarizing(n, p, d);
      case NoiseKind::kIndependentXZ: return independent_xz(n, p, pz, d);
    }
    throw ValidationError("unknown noise kind");
  }
  NoiseModel at(double rate) const {
    NoiseModel m = *this;
    m.p = rate;
    return m;
  }
  std::string kind_name() const {
    switch (kind) {
      case NoiseKind::kBitFlip: return "bit_flip";
      case NoiseKind::kPhaseFlip: return "phase_flip";
      case NoiseKind::kDepolarizing: return "depolarizing";
      case NoiseKind::kIndependentXZ: return "independent_xz";
    }
    return "unknown";
  }
  static NoiseKind parse_kind(const std::string& s) {
    if (s == "bit_flip") return NoiseKind::kBitFlip;
    if (s == "phase_flip") return NoiseKind::kPhaseFlip;
    if (s == "depolarizing") return NoiseKind::kDepolarizing;
    if (s == "independent_xz") return NoiseKind::kIndependentXZ;
    throw ConfigError("unknown noise model '" + s + "'");
  }
};

struct KrausTerm {
  SympVector eta;
  double amplitude;  // sqrt(Pr(eta))
};

// Enumerated Kraus operators sqrt(Pr(eta)) T(eta). captured_mass is the total
// probability of the listed labels; below 1 when a weight cap truncates.
struct KrausSet {
  std::vector<KrausTerm> terms;
  double captured_mass = 0.0;
  std::size_t size() const { return terms.size(); }
};

// Lists every positive-probability label (optionally of weight <= cap) in
// lexicographic order of the per-site label tuples, site 0 varying slowest.
inline KrausSet kraus_enumerate(const WeylChannel& ch,
                                std::optional<std::size_t> weight_cap = std::nullopt,
                                std::uint64_t budget = std::uint64_t{1} << 20) {
  const std::size_t n = ch.n();
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> sup(n);
  for (std::size_t i = 0; i < n; ++i) sup[i] = ch.support(i);
  if (!weight_cap) {
    double total = 1.0;
    for (const auto& s : sup) total *= static_cast<double>(s.size());
    if (total > static_cast<double>(budget)) {
      throw BudgetError("full Kraus enumeration exceeds budget; set a weight cap");
    }
  }
  KrausSet out;
  std::vector<std::size_t> idx(n, 0);
  SympVector eta(n, ch.d());
  std::uint64_t visited = 0;
  // Depth-first over sites with pruning on weight.
  auto rec = [&](auto&& self, std::size_t site, std::size_t weight) -> void {
    if (site == n) {
      if (++visited > budget) throw BudgetError("Kraus enumeration exceeds budget");
      const double p = ch.prob(eta);
      out.terms.push_back({eta, std::sqrt(p)});
      out.captured_mass += p;
      return;
    }
    for (const auto& [x, z] : sup[site]) {
      const bool nontrivial = x != 0 || z != 0;
      if (nontrivial && weight_cap && weight + 1 > *weight_cap) continue;
      eta.set_x(site, x);
      eta.set_z(site, z);
      self(self, site + 1, weight + (nontrivial ? 1 : 0));
    }
    eta.set_x(site, 0);
    eta.set_z(site, 0);
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace aqec
