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

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aqec/error.hpp"
#include "aqec/fields.hpp"

namespace aqec {

// Edge/vertex/plaquette bookkeeping for the L x L periodic square lattice with
// qudits on edges. Horizontal edge h(x, y) joins (x, y)-(x+1, y); vertical
// edge v(x, y) joins (x, y)-(x, y+1).
class ToricLattice {
 public:
  struct OrientedEdge {
    std::size_t edge;
    int sign;  // +1 or -1: exponent of X (vertex) or Z (plaquette)
  };

  explicit ToricLattice(std::size_t L) : L_(L) {
    if (L < 2) throw ValidationError("toric lattice needs L >= 2");
  }

  std::size_t size() const { return L_; }
  std::size_t num_edges() const { return 2 * L_ * L_; }
  std::size_t h(std::size_t x, std::size_t y) const {
    return (y % L_) * L_ + (x % L_);
  }
  std::size_t v(std::size_t x, std::size_t y) const {
    return L_ * L_ + (y % L_) * L_ + (x % L_);
  }

  // Outgoing edges carry +1, incoming edges -1.
  std::vector<OrientedEdge> vertex(std::size_t x, std::size_t y) const {
    return {{h(x, y), +1}, {v(x, y), +1}, {h(x + L_ - 1, y), -1},
            {v(x, y + L_ - 1), -1}};
  }
  // Counter-clockwise boundary of the plaquette with lower-left corner (x, y).
  std::vector<OrientedEdge> plaquette(std::size_t x, std::size_t y) const {
    return {{h(x, y), +1}, {v(x + 1, y), +1}, {h(x, y + 1), -1}, {v(x, y), -1}};
  }
  std::vector<std::size_t> plaquette_edges(std::size_t p) const {
    std::vector<std::size_t> e;
    for (const auto& oe : plaquette(p % L_, p / L_)) e.push_back(oe.edge);
    return e;
  }

  // Supports of the non-contractible loops.
  std::vector<std::size_t> z_loop(int which) const {
    std::vector<std::size_t> e;
    for (std::size_t t = 0; t < L_; ++t) e.push_back(which == 1 ? h(t, 0) : v(0, t));
    return e;
  }
  std::vector<std::size_t> x_loop(int which) const {
    std::vector<std::size_t> e;
    for (std::size_t t = 0; t < L_; ++t) e.push_back(which == 1 ? h(0, t) : v(t, 0));
    return e;
  }

 private:
  std::size_t L_;
};

// Which single-site labels count towards weight in distance searches.
enum class WeightSector { kAll, kXOnly, kZOnly };

struct Decomposition {
  std::vector<std::uint32_t> syndrome;       // length n - k
  std::vector<std::uint32_t> logical_class;  // length 2k, [X1, Z1, X2, Z2, ...]
  SympVector stabilizer_part;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> diagnostics;
  explicit operator bool() const { return ok; }
};

class StabilizerCode;
inline ValidationReport validate(const StabilizerCode& code);
inline std::optional<std::size_t> code_distance(const StabilizerCode& code,
                                         WeightSector sector,
                                         std::uint64_t budget);

namespace detail {
struct DistanceCache {
  std::mutex mutex;
  bool ready = false;
  std::optional<std::size_t> value;
};
}  // namespace detail

class StabilizerCode {
 public:
  // Assembles a tableau without checking it; see validate().
  static StabilizerCode from_parts(std::string name, std::size_t n,
                                   std::uint32_t d,
                                   std::vector<SympVector> generators,
                                   std::vector<SympVector> logicals,
                                   std::vector<SympVector> pure_errors) {
    StabilizerCode c;
    c.name_ = std::move(name);
    c.n_ = n;
    c.d_ = d;
    c.k_ = generators.size() <= n ? n - generators.size() : 0;
    c.stab_ = rref(generators, n, d);
    c.generators_ = std::move(generators);
    c.logicals_ = std::move(logicals);
    c.pure_errors_ = std::move(pure_errors);
    c.distance_ = std::make_shared<detail::DistanceCache>();
    return c;
  }

  const std::string& name() const { return name_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::uint32_t d() const { return d_; }
  // d^k, the code space dimension.
  std::uint64_t K() const {
    std::uint64_t K = 1;
    for (std::size_t i = 0; i < k_; ++i) K *= d_;
    return K;
  }
  std::size_t num_classes() const {
    std::size_t c = 1;
    for (std::size_t i = 0; i < 2 * k_; ++i) c *= d_;
    return c;
  }

  const std::vector<SympVector>& generators() const { return generators_; }
  const Subspace& stabilizer() const { return stab_; }
  const std::vector<SympVector>& logicals() const { return logicals_; }
  const std::vector<SympVector>& pure_errors() const { return pure_errors_; }

  // Full-sector distance, searched on first use and cached (shared by copies).
  std::optional<std::size_t> distance() const;
  // Records an analytically known distance so the search is skipped.
  void seed_distance(std::size_t delta) const {
    std::lock_guard lock(distance_->mutex);
    distance_->ready = true;
    distance_->value = delta;
  }

  SympVector zero() const { return SympVector(n_, d_); }

  // Phase-space vector of a logical class given its coefficient vector.
  SympVector logical_vector(std::span<const std::uint32_t> coeffs) const {
    SympVector v = zero();
    for (std::size_t t = 0; t < logicals_.size(); ++t) {
      v.add_scaled(logicals_[t], coeffs[t]);
    }
    return v;
  }
  SympVector syndrome_vector(std::span<const std::uint32_t> syndrome) const {
    SympVector v = zero();
    for (std::size_t i = 0; i < pure_errors_.size(); ++i) {
      v.add_scaled(pure_errors_[i], syndrome[i]);
    }
    return v;
  }

  // Canonical mixed-radix index of a logical class.
  std::size_t class_index(std::span<const std::uint32_t> coeffs) const {
    std::size_t idx = 0;
    for (std::size_t t = coeffs.size(); t-- > 0;) idx = idx * d_ + coeffs[t];
    return idx;
  }
  std::vector<std::uint32_t> class_coeffs(std::size_t idx) const {
    std::vector<std::uint32_t> c(2 * k_);
    for (auto& v : c) {
      v = static_cast<std::uint32_t>(idx % d_);
      idx /= d_;
    }
    return c;
  }

 private:
  std::string name_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::uint32_t d_ = 2;
  std::vector<SympVector> generators_;
  Subspace stab_;
  std::vector<SympVector> logicals_;
  std::vector<SympVector> pure_errors_;
  std::shared_ptr<detail::DistanceCache> distance_;
};

inline std::vector<std::uint32_t> syndrome_of(const StabilizerCode& code,
                                              const SympVector& eta) {
  std::vector<std::uint32_t> s(code.generators().size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    s[j] = symplectic_value(eta, code.generators()[j]);
  }
  return s;
}

// Unique eta = s + l + m with s in span(pure errors), l in span(logicals),
// m in the stabilizer space. Relies on <pure_i, gen_j> = delta_ij and the
// logical pairs <X_i, Z_j> = delta_ij; eta - s lies in the normalizer.
inline Decomposition decompose(const StabilizerCode& code, const SympVector& eta) {
  if (eta.n() != code.n() || eta.d() != code.d()) {
    throw DimensionError("error label does not match code");
  }
  const std::uint32_t d = code.d();
  Decomposition out;
  out.syndrome = syndrome_of(code, eta);
  SympVector rest = eta;
  for (std::size_t i = 0; i < out.syndrome.size(); ++i) {
    rest.add_scaled(code.pure_errors()[i], d - out.syndrome[i]);
  }
  out.logical_class.assign(2 * code.k(), 0);
  for (std::size_t i = 0; i < code.k(); ++i) {
    const auto& xl = code.logicals()[2 * i];
    const auto& zl = code.logicals()[2 * i + 1];
    out.logical_class[2 * i] = symplectic_value(rest, zl);
    out.logical_class[2 * i + 1] = (d - symplectic_value(rest, xl)) % d;
  }
  rest -= code.logical_vector(out.logical_class);
  out.stabilizer_part = std::move(rest);
  return out;
}

inline ValidationReport validate(const StabilizerCode& code) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    rep.ok = false;
    rep.diagnostics.push_back(std::move(msg));
  };
  const std::size_t n = code.n();
  const std::uint32_t d = code.d();
  const auto& gens = code.generators();
  const auto& logs = code.logicals();
  const auto& pures = code.pure_errors();
  if (!is_prime(d)) fail("local dimension is not prime");
  if (gens.size() > n) fail("more generators than qudits");
  auto shape_ok = [&](const std::vector<SympVector>& vs) {
    for (const auto& v : vs) {
      if (v.n() != n || v.d() != d) return false;
    }
    return true;
  };
  if (!shape_ok(gens) || !shape_ok(logs) || !shape_ok(pures)) {
    fail("vector shape does not match (n, d)");
    return rep;
  }
  if (code.stabilizer().rank() != gens.size()) fail("generators are dependent");
  if (!is_isotropic(code.stabilizer())) fail("stabilizer space is not isotropic");
  if (logs.size() != 2 * code.k()) fail("expected 2k logical operators");
  if (pures.size() != gens.size()) fail("expected n-k pure errors");
  if (!rep.ok) return rep;

  for (std::size_t i = 0; i < pures.size(); ++i) {
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (symplectic_value(pures[i], gens[j]) != (i == j ? 1U : 0U)) {
        fail("pure error " + std::to_string(i) + " is not dual to generator " +
             std::to_string(j));
      }
    }
  }
  for (std::size_t t = 0; t < logs.size(); ++t) {
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (symplectic_value(logs[t], gens[j]) != 0) {
        fail("logical " + std::to_string(t) + " anticommutes with generator " +
             std::to_string(j));
      }
    }
    for (std::size_t u = 0; u < logs.size(); ++u) {
      std::uint32_t want = 0;
      if (t / 2 == u / 2 && t % 2 == 0 && u % 2 == 1) want = 1;
      if (t / 2 == u / 2 && t % 2 == 1 && u % 2 == 0) want = d - 1;
      if (symplectic_value(logs[t], logs[u]) != want) {
        fail("logicals " + std::to_string(t) + "," + std::to_string(u) +
             " break the canonical pairing");
      }
    }
  }
  std::vector<SympVector> all = gens;
  all.insert(all.end(), logs.begin(), logs.end());
  all.insert(all.end(), pures.begin(), pures.end());
  if (rref(all, n, d).rank() != 2 * n) fail("tableau does not span Z_d^{2n}");
  return rep;
}

namespace detail {

// Solves <p, w_c> = rhs_c for p over Z_d^{2n}.
inline std::optional<SympVector> solve_forms(std::span<const SympVector> ws,
                                             std::span<const std::uint32_t> rhs,
                                             std::size_t n, std::uint32_t d) {
  ModMatrix m(ws.size(), 2 * n, d);
  for (std::size_t c = 0; c < ws.size(); ++c) {
    for (std::size_t s = 0; s < n; ++s) {
      m.at(c, s) = ws[c].z(s);
      m.at(c, n + s) = (d - ws[c].x(s)) % d;
    }
  }
  const auto sol = m.solve(rhs);
  if (!sol) return std::nullopt;
  SympVector p(n, d);
  for (std::size_t t = 0; t < 2 * n; ++t) p.set_coord(t, (*sol)[t]);
  return p;
}

// Symplectic Gram-Schmidt on the normalizer modulo the stabilizer space.
inline std::vector<SympVector> find_logicals(const std::vector<SympVector>& gens,
                                             std::size_t n, std::uint32_t d) {
  std::vector<SympVector> spanning = gens;
  std::vector<SympVector> extra;
  for (auto& v : symplectic_complement(gens, n, d)) {
    spanning.push_back(v);
    if (rref(spanning, n, d).rank() == gens.size() + extra.size() + 1) {
      extra.push_back(v);
    } else {
      spanning.pop_back();
    }
  }
  std::vector<SympVector> out;
  while (!extra.empty()) {
    SympVector a = extra.front();
    extra.erase(extra.begin());
    std::size_t partner = extra.size();
    for (std::size_t i = 0; i < extra.size(); ++i) {
      if (symplectic_value(a, extra[i]) != 0) {
        partner = i;
        break;
      }
    }
    if (partner == extra.size()) {
      throw ValidationError("normalizer is degenerate modulo stabilizers");
    }
    SympVector b = extra[partner];
    extra.erase(extra.begin() + static_cast<std::ptrdiff_t>(partner));
    b = b.scaled(mod_inverse(symplectic_value(a, b), d));
    for (auto& c : extra) {
      const std::uint32_t cb = symplectic_value(c, b);
      const std::uint32_t ca = symplectic_value(c, a);
      c.add_scaled(a, d - cb);
      c.add_scaled(b, ca);
    }
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
  return out;
}

// Pure errors dual to the generators and commuting with logicals and each other.
inline std::vector<SympVector> find_pure_errors(const std::vector<SympVector>& gens,
                                                const std::vector<SympVector>& logs,
                                                std::size_t n, std::uint32_t d) {
  std::vector<SympVector> constraints = gens;
  constraints.insert(constraints.end(), logs.begin(), logs.end());
  std::vector<SympVector> pures;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::vector<std::uint32_t> rhs(constraints.size(), 0);
    rhs[i] = 1;
    auto p = solve_forms(constraints, rhs, n, d);
    if (!p) throw ValidationError("no pure error dual to generator " + std::to_string(i));
    for (std::size_t j = 0; j < i; ++j) {
      p->add_scaled(gens[j], symplectic_value(*p, pures[j]));
    }
    pures.push_back(std::move(*p));
  }
  return pures;
}

}  // namespace detail

// Builds a validated code from independent commuting generators. Logicals are
// computed when not supplied; supplied logicals are ordered X1, Z1, X2, Z2, ...
// Supplied pure errors need only be dual to the generators.
inline StabilizerCode make_custom(std::vector<SympVector> generators,
                                  std::vector<SympVector> logicals = {},
                                  std::string name = "custom",
                                  std::vector<SympVector> pure_errors = {}) {
  if (generators.empty()) throw ValidationError("no generators given");
  const std::size_t n = generators.front().n();
  const std::uint32_t d = generators.front().d();
  for (const auto& g : generators) {
    if (g.n() != n || g.d() != d) throw ValidationError("generator shape mismatch");
  }
  const Subspace stab = rref(generators, n, d);
  if (stab.rank() != generators.size()) throw ValidationError("generators are dependent");
  if (!is_isotropic(stab)) throw ValidationError("generators do not commute");
  if (logicals.empty()) logicals = detail::find_logicals(generators, n, d);
  auto pures = pure_errors.empty() ? detail::find_pure_errors(generators, logicals, n, d)
                                   : std::move(pure_errors);
  auto code = StabilizerCode::from_parts(std::move(name), n, d, std::move(generators),
                                         std::move(logicals), std::move(pures));
  if (auto rep = validate(code); !rep) {
    throw ValidationError("invalid code: " + rep.diagnostics.front());
  }
  return code;
}

// n-qubit bit-flip repetition code: stabilizers Z_i Z_{i+1}, X-bar = X^n,
// Z-bar = Z_1. The syndrome representative of generator i is X_1 ... X_{i+1},
// so a single flip on the first qubit carries a trivial logical class.
inline StabilizerCode make_repetition(std::size_t n_qubits) {
  if (n_qubits < 2) throw ValidationError("repetition code needs n >= 2");
  std::vector<SympVector> gens;
  for (std::size_t i = 0; i + 1 < n_qubits; ++i) {
    SympVector g(n_qubits, 2);
    g.set_z(i, 1);
    g.set_z(i + 1, 1);
    gens.push_back(std::move(g));
  }
  SympVector xl(n_qubits, 2);
  SympVector zl(n_qubits, 2);
  for (std::size_t i = 0; i < n_qubits; ++i) xl.set_x(i, 1);
  zl.set_z(0, 1);
  std::vector<SympVector> pures;
  for (std::size_t i = 0; i + 1 < n_qubits; ++i) {
    SympVector p(n_qubits, 2);
    for (std::size_t j = 0; j <= i; ++j) p.set_x(j, 1);
    pures.push_back(std::move(p));
  }
  return make_custom(std::move(gens), {xl, zl}, "rep-" + std::to_string(n_qubits),
                     std::move(pures));
}

inline StabilizerCode make_five_qubit() {
  std::vector<SympVector> gens;
  for (const char* s : {"10010|01100", "01001|00110", "10100|00011", "01010|10001"}) {
    gens.push_back(SympVector::parse(s, 2));
  }
  auto code = make_custom(std::move(gens),
                          {SympVector::parse("11111|00000", 2),
                           SympVector::parse("00000|11111", 2)},
                          "five_qubit");
  code.seed_distance(3);
  return code;
}

// Qudit toric code on the L x L torus. Vertex generators are X-type, plaquette
// generators Z-type; the last vertex and last plaquette are dropped since each
// family multiplies to the identity.
inline StabilizerCode make_toric_qudit(std::size_t L, std::uint32_t d) {
  require_prime(d);
  const ToricLattice lat(L);
  const std::size_t n = lat.num_edges();
  auto exponent = [d](int sign) {
    return sign > 0 ? 1U : d - 1;
  };
  std::vector<SympVector> gens;
  for (std::size_t idx = 0; idx + 1 < L * L; ++idx) {
    SympVector g(n, d);
    for (const auto& oe : lat.vertex(idx % L, idx / L)) g.set_x(oe.edge, exponent(oe.sign));
    gens.push_back(std::move(g));
  }
  for (std::size_t idx = 0; idx + 1 < L * L; ++idx) {
    SympVector g(n, d);
    for (const auto& oe : lat.plaquette(idx % L, idx / L)) g.set_z(oe.edge, exponent(oe.sign));
    gens.push_back(std::move(g));
  }
  std::vector<SympVector> logs;
  for (int which : {1, 2}) {
    SympVector xl(n, d);
    SympVector zl(n, d);
    for (auto e : lat.x_loop(which)) xl.set_x(e, 1);
    for (auto e : lat.z_loop(which)) zl.set_z(e, 1);
    logs.push_back(std::move(xl));
    logs.push_back(std::move(zl));
  }
  std::string name = "toric-" + std::to_string(L);
  if (d != 2) name += "-d" + std::to_string(d);
  auto code = make_custom(std::move(gens), std::move(logs), std::move(name));
  code.seed_distance(L);
  return code;
}

inline StabilizerCode make_toric(std::size_t L) { return make_toric_qudit(L, 2); }

namespace detail {

inline std::vector<std::pair<std::uint32_t, std::uint32_t>> sector_labels(
    std::uint32_t d, WeightSector sector) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> labels;
  for (std::uint32_t x = 0; x < d; ++x) {
    for (std::uint32_t z = 0; z < d; ++z) {
      if (x == 0 && z == 0) continue;
      if (sector == WeightSector::kXOnly && z != 0) continue;
      if (sector == WeightSector::kZOnly && x != 0) continue;
      labels.emplace_back(x, z);
    }
  }
  return labels;
}

}  // namespace detail

// Minimum weight of an error with trivial syndrome and nontrivial logical
// class, searching weights in increasing order. nullopt when no such error
// exists within the sector (e.g. k = 0).
inline std::optional<std::size_t> code_distance(
    const StabilizerCode& code, WeightSector sector = WeightSector::kAll,
    std::uint64_t budget = std::uint64_t{1} << 26) {
  const std::size_t n = code.n();
  const auto labels = detail::sector_labels(code.d(), sector);
  std::uint64_t spent = 0;
  std::vector<std::size_t> sites;
  std::vector<std::size_t> label_idx;
  for (std::size_t w = 1; w <= n; ++w) {
    sites.resize(w);
    for (std::size_t i = 0; i < w; ++i) sites[i] = i;
    while (true) {
      label_idx.assign(w, 0);
      while (true) {
        if (++spent > budget) throw BudgetError("distance search exceeded budget");
        SympVector eta = code.zero();
        for (std::size_t i = 0; i < w; ++i) {
          eta.set_x(sites[i], labels[label_idx[i]].first);
          eta.set_z(sites[i], labels[label_idx[i]].second);
        }
        bool trivial_syndrome = true;
        for (const auto& g : code.generators()) {
          if (symplectic_value(eta, g) != 0) {
            trivial_syndrome = false;
            break;
          }
        }
        if (trivial_syndrome && !code.stabilizer().contains(eta)) return w;
        std::size_t t = 0;
        while (t < w && ++label_idx[t] == labels.size()) label_idx[t++] = 0;
        if (t == w) break;
      }
      // next combination of sites
      std::size_t i = w;
      while (i > 0 && sites[i - 1] == n - w + (i - 1)) --i;
      if (i == 0) break;
      ++sites[i - 1];
      for (std::size_t j = i; j < w; ++j) sites[j] = sites[j - 1] + 1;
    }
  }
  return std::nullopt;
}

inline std::optional<std::size_t> StabilizerCode::distance() const {
  std::lock_guard lock(distance_->mutex);
  if (!distance_->ready) {
    distance_->value = code_distance(*this, WeightSector::kAll, std::uint64_t{1} << 26);
    distance_->ready = true;
  }
  return distance_->value;
}

// Plain-text tableau format:
//   # comment
//   <n> <k> <d>
//   S <x>|<z>        one line per stabilizer generator
//   L <x>|<z>        optional, 2k lines ordered X1 Z1 X2 Z2 ...
inline std::string write_code_text(const StabilizerCode& code) {
  std::ostringstream out;
  out << "# " << code.name() << "\n";
  out << code.n() << " " << code.k() << " " << code.d() << "\n";
  for (const auto& g : code.generators()) out << "S " << g.to_string() << "\n";
  for (const auto& l : code.logicals()) out << "L " << l.to_string() << "\n";
  return out.str();
}

inline StabilizerCode parse_code_text(const std::string& text,
                                      std::string name = "custom") {
  std::istringstream in(text);
  std::string line;
  std::optional<std::size_t> n;
  std::size_t k = 0;
  std::uint32_t d = 2;
  std::vector<SympVector> gens;
  std::vector<SympVector> logs;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      if (hash == 0 && line.size() > 2 && name == "custom") name = line.substr(2);
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (!n) {
      std::size_t nn = 0;
      try {
        nn = std::stoul(head);
      } catch (const std::exception&) {
        throw ValidationError("code file must start with 'n k d'");
      }
      if (!(ls >> k >> d)) throw ValidationError("code header must be 'n k d'");
      require_prime(d);
      n = nn;
      continue;
    }
    std::string body;
    if (!(ls >> body)) throw ValidationError("missing vector after '" + head + "'");
    auto v = SympVector::parse(body, d);
    if (v.n() != *n) throw ValidationError("vector length does not match n");
    if (head == "S") {
      gens.push_back(std::move(v));
    } else if (head == "L") {
      logs.push_back(std::move(v));
    } else {
      throw ValidationError("unknown line tag '" + head + "'");
    }
  }
  if (!n) throw ValidationError("empty code file");
  if (gens.size() + k != *n) throw ValidationError("header k does not match generator count");
  return make_custom(std::move(gens), std::move(logs), std::move(name));
}

inline StabilizerCode read_code_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open code file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_code_text(ss.str());
}

}  // namespace aqec
