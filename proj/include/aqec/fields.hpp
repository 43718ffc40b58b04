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

// Prime-field arithmetic and symplectic linear algebra on the phase space
// Z_d^{2n}. Coordinates are laid out as [x_0 .. x_{n-1}, z_0 .. z_{n-1}];
// row reduction sweeps columns in that order, so x pivots come first.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aqec/error.hpp"

namespace aqec {

inline bool is_prime(std::uint32_t d) {
  if (d < 2) return false;
  for (std::uint32_t f = 2; f * f <= d; ++f) {
    if (d % f == 0) return false;
  }
  return true;
}

// Throws ValidationError unless d is a prime that fits the byte storage.
inline void require_prime(std::uint32_t d) {
  if (!is_prime(d) || d > 251) {
    throw ValidationError("local dimension " + std::to_string(d) +
                          " is not a supported prime");
  }
}

inline std::uint32_t mod_pow(std::uint32_t base, std::uint32_t exp,
                             std::uint32_t d) {
  std::uint64_t result = 1 % d;
  std::uint64_t b = base % d;
  while (exp > 0) {
    if (exp & 1U) result = result * b % d;
    b = b * b % d;
    exp >>= 1U;
  }
  return static_cast<std::uint32_t>(result);
}

// Multiplicative inverse in Z_d, d prime. a must be nonzero mod d.
inline std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t d) {
  if (a % d == 0) throw DegenerateInputError("zero has no inverse mod d");
  return mod_pow(a, d - 2, d);
}

class FieldElement {
 public:
  FieldElement(std::uint32_t value, std::uint32_t modulus)
      : value_(value % modulus), modulus_(modulus) {
    require_prime(modulus);
  }

  std::uint32_t value() const { return value_; }
  std::uint32_t modulus() const { return modulus_; }

  FieldElement operator+(FieldElement o) const {
    check(o);
    return raw((value_ + o.value_) % modulus_, modulus_);
  }
  FieldElement operator-(FieldElement o) const {
    check(o);
    return raw((value_ + modulus_ - o.value_) % modulus_, modulus_);
  }
  FieldElement operator-() const {
    return raw((modulus_ - value_) % modulus_, modulus_);
  }
  FieldElement operator*(FieldElement o) const {
    check(o);
    return raw(static_cast<std::uint32_t>(
                   static_cast<std::uint64_t>(value_) * o.value_ % modulus_),
               modulus_);
  }
  FieldElement inverse() const {
    return raw(mod_inverse(value_, modulus_), modulus_);
  }
  FieldElement operator/(FieldElement o) const { return *this * o.inverse(); }

  bool operator==(const FieldElement&) const = default;
  bool is_zero() const { return value_ == 0; }

 private:
  struct Unchecked {};
  FieldElement(std::uint32_t value, std::uint32_t modulus, Unchecked)
      : value_(value), modulus_(modulus) {}
  static FieldElement raw(std::uint32_t v, std::uint32_t d) {
    return FieldElement(v, d, Unchecked{});
  }
  void check(FieldElement o) const {
    if (o.modulus_ != modulus_) throw DimensionError("field modulus mismatch");
  }

  std::uint32_t value_;
  std::uint32_t modulus_;
};

// A point (x | z) of Z_d^{2n}, labelling the Weyl operator X^x Z^z up to phase.
class SympVector {
 public:
  SympVector() = default;
  SympVector(std::size_t n, std::uint32_t d) : n_(n), d_(d), c_(2 * n, 0) {
    require_prime(d);
  }

  static SympVector from_parts(std::span<const std::uint32_t> x,
                               std::span<const std::uint32_t> z,
                               std::uint32_t d) {
    if (x.size() != z.size()) throw DimensionError("x/z length mismatch");
    SympVector v(x.size(), d);
    for (std::size_t i = 0; i < x.size(); ++i) {
      v.set_x(i, x[i]);
      v.set_z(i, z[i]);
    }
    return v;
  }

  // Parses "x_0..x_{n-1}|z_0..z_{n-1}" with one digit per coordinate.
  static SympVector parse(std::string_view text, std::uint32_t d) {
    const auto bar = text.find('|');
    if (bar == std::string_view::npos || bar * 2 + 1 != text.size()) {
      throw ValidationError("malformed phase-space vector '" +
                            std::string(text) + "'");
    }
    const std::size_t n = bar;
    SympVector v(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const char cx = text[i];
      const char cz = text[bar + 1 + i];
      if (cx < '0' || cx > '9' || cz < '0' || cz > '9') {
        throw ValidationError("non-digit in phase-space vector");
      }
      if (static_cast<std::uint32_t>(cx - '0') >= d ||
          static_cast<std::uint32_t>(cz - '0') >= d) {
        throw ValidationError("digit exceeds local dimension");
      }
      v.set_x(i, static_cast<std::uint32_t>(cx - '0'));
      v.set_z(i, static_cast<std::uint32_t>(cz - '0'));
    }
    return v;
  }

  std::size_t n() const { return n_; }
  std::uint32_t d() const { return d_; }
  std::size_t size() const { return c_.size(); }

  std::uint32_t x(std::size_t i) const { return c_[i]; }
  std::uint32_t z(std::size_t i) const { return c_[n_ + i]; }
  void set_x(std::size_t i, std::uint32_t v) {
    c_[i] = static_cast<std::uint8_t>(v % d_);
  }
  void set_z(std::size_t i, std::uint32_t v) {
    c_[n_ + i] = static_cast<std::uint8_t>(v % d_);
  }
  std::uint32_t coord(std::size_t t) const { return c_[t]; }
  void set_coord(std::size_t t, std::uint32_t v) {
    c_[t] = static_cast<std::uint8_t>(v % d_);
  }
  std::span<const std::uint8_t> coords() const { return c_; }

  SympVector& operator+=(const SympVector& o) {
    check(o);
    for (std::size_t t = 0; t < c_.size(); ++t) {
      c_[t] = static_cast<std::uint8_t>((c_[t] + o.c_[t]) % d_);
    }
    return *this;
  }
  SympVector& operator-=(const SympVector& o) {
    check(o);
    for (std::size_t t = 0; t < c_.size(); ++t) {
      c_[t] = static_cast<std::uint8_t>((c_[t] + d_ - o.c_[t]) % d_);
    }
    return *this;
  }
  // this += scale * o
  SympVector& add_scaled(const SympVector& o, std::uint32_t scale) {
    check(o);
    scale %= d_;
    if (scale == 0) return *this;
    for (std::size_t t = 0; t < c_.size(); ++t) {
      c_[t] = static_cast<std::uint8_t>((c_[t] + scale * o.c_[t]) % d_);
    }
    return *this;
  }
  friend SympVector operator+(SympVector a, const SympVector& b) {
    return a += b;
  }
  friend SympVector operator-(SympVector a, const SympVector& b) {
    return a -= b;
  }
  SympVector operator-() const {
    SympVector r(n_, d_);
    r -= *this;
    return r;
  }
  SympVector scaled(std::uint32_t s) const {
    SympVector r(n_, d_);
    r.add_scaled(*this, s);
    return r;
  }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](auto c) { return c == 0; });
  }
  // Number of sites carrying a non-identity label.
  std::size_t weight() const {
    std::size_t w = 0;
    for (std::size_t i = 0; i < n_; ++i) w += (c_[i] != 0 || c_[n_ + i] != 0);
    return w;
  }
  std::size_t x_weight() const {
    return static_cast<std::size_t>(
        std::count_if(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(n_),
                      [](auto c) { return c != 0; }));
  }

  std::string to_string() const {
    std::string s;
    s.reserve(2 * n_ + 1);
    for (std::size_t i = 0; i < n_; ++i) s.push_back(static_cast<char>('0' + c_[i]));
    s.push_back('|');
    for (std::size_t i = 0; i < n_; ++i) {
      s.push_back(static_cast<char>('0' + c_[n_ + i]));
    }
    return s;
  }

  bool operator==(const SympVector& o) const {
    return d_ == o.d_ && n_ == o.n_ && c_ == o.c_;
  }
  std::strong_ordering operator<=>(const SympVector& o) const {
    if (auto c = n_ <=> o.n_; c != 0) return c;
    if (auto c = d_ <=> o.d_; c != 0) return c;
    return c_ <=> o.c_;
  }

  void check(const SympVector& o) const {
    if (o.n_ != n_ || o.d_ != d_) {
      throw DimensionError("phase-space vectors differ in n or d");
    }
  }

 private:
  std::size_t n_ = 0;
  std::uint32_t d_ = 2;
  std::vector<std::uint8_t> c_;
};

// <a, b> = a.x . b.z - a.z . b.x  (mod d), as a raw residue.
inline std::uint32_t symplectic_value(const SympVector& a, const SympVector& b) {
  a.check(b);
  const std::uint64_t d = a.d();
  std::uint64_t plus = 0;
  std::uint64_t minus = 0;
  for (std::size_t i = 0; i < a.n(); ++i) {
    plus += static_cast<std::uint64_t>(a.x(i)) * b.z(i);
    minus += static_cast<std::uint64_t>(a.z(i)) * b.x(i);
  }
  return static_cast<std::uint32_t>((plus % d + d - minus % d) % d);
}

inline FieldElement symplectic_form(const SympVector& a, const SympVector& b) {
  return FieldElement(symplectic_value(a, b), a.d());
}

namespace detail {

// Dense matrix over Z_d used for the small linear systems behind subspace
// intersections, normalizers and coset base points.
struct ModMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint32_t d = 2;
  std::vector<std::uint32_t> a;

  ModMatrix(std::size_t r, std::size_t c, std::uint32_t mod)
      : rows(r), cols(c), d(mod), a(r * c, 0) {}
  std::uint32_t& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  std::uint32_t at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  // In-place reduced row echelon form; returns pivot columns in order.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
      std::size_t p = r;
      while (p < rows && at(p, c) == 0) ++p;
      if (p == rows) continue;
      if (p != r) {
        for (std::size_t j = 0; j < cols; ++j) std::swap(at(p, j), at(r, j));
      }
      const std::uint32_t inv = mod_inverse(at(r, c), d);
      for (std::size_t j = 0; j < cols; ++j) {
        at(r, j) = static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(at(r, j)) * inv % d);
      }
      for (std::size_t i = 0; i < rows; ++i) {
        if (i == r || at(i, c) == 0) continue;
        const std::uint32_t f = at(i, c);
        for (std::size_t j = 0; j < cols; ++j) {
          at(i, j) = static_cast<std::uint32_t>(
              (at(i, j) + static_cast<std::uint64_t>(d - f) * at(r, j)) % d);
        }
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  // Basis of { c : A c = 0 }.
  std::vector<std::vector<std::uint32_t>> nullspace() const {
    ModMatrix m = *this;
    const auto pivots = m.rref();
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<std::uint32_t>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
      if (is_pivot[f]) continue;
      std::vector<std::uint32_t> v(cols, 0);
      v[f] = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        v[pivots[r]] = (d - m.at(r, f)) % d;
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // One solution of A c = b, or nullopt if inconsistent.
  std::optional<std::vector<std::uint32_t>> solve(
      std::span<const std::uint32_t> b) const {
    if (b.size() != rows) throw DimensionError("right-hand side length");
    ModMatrix aug(rows, cols + 1, d);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols) = b[i] % d;
    }
    const auto pivots = aug.rref();
    std::vector<std::uint32_t> c(cols, 0);
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      if (pivots[r] == cols) return std::nullopt;
      c[pivots[r]] = aug.at(r, cols);
    }
    return c;
  }
};

}  // namespace detail

// A linear subspace of Z_d^{2n}, held as a reduced row-echelon basis.
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::size_t n, std::uint32_t d) : n_(n), d_(d) { require_prime(d); }

  std::size_t ambient_n() const { return n_; }
  std::uint32_t modulus() const { return d_; }
  std::size_t rank() const { return basis_.size(); }
  const std::vector<SympVector>& basis() const { return basis_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  // Number of elements d^rank, or nullopt on 64-bit overflow.
  std::optional<std::uint64_t> size() const {
    std::uint64_t s = 1;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (s > std::numeric_limits<std::uint64_t>::max() / d_) return std::nullopt;
      s *= d_;
    }
    return s;
  }

  // v minus its projection along the pivot columns; zero iff v is a member.
  SympVector reduce(SympVector v) const {
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      const std::uint32_t c = v.coord(pivots_[r]);
      if (c != 0) v.add_scaled(basis_[r], d_ - c);
    }
    return v;
  }
  bool contains(const SympVector& v) const { return reduce(v).is_zero(); }

  // Coefficients of a member in the basis (values at the pivot columns).
  std::vector<std::uint32_t> coordinates(const SympVector& v) const {
    std::vector<std::uint32_t> c(rank());
    for (std::size_t r = 0; r < rank(); ++r) c[r] = v.coord(pivots_[r]);
    return c;
  }

  bool operator==(const Subspace& o) const {
    return n_ == o.n_ && d_ == o.d_ && basis_ == o.basis_;
  }

 private:
  friend Subspace rref(std::span<const SympVector>, std::size_t, std::uint32_t);
  std::size_t n_ = 0;
  std::uint32_t d_ = 2;
  std::vector<SympVector> basis_;
  std::vector<std::size_t> pivots_;
};

// Canonical reduced row-echelon basis of span(rows).
inline Subspace rref(std::span<const SympVector> rows, std::size_t n,
                     std::uint32_t d) {
  Subspace sub(n, d);
  const std::size_t cols = 2 * n;
  detail::ModMatrix m(rows.size(), cols, d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].n() != n || rows[i].d() != d) {
      throw DimensionError("rref rows do not share (n, d)");
    }
    for (std::size_t t = 0; t < cols; ++t) m.at(i, t) = rows[i].coord(t);
  }
  const auto pivots = m.rref();
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    SympVector v(n, d);
    for (std::size_t t = 0; t < cols; ++t) v.set_coord(t, m.at(r, t));
    sub.basis_.push_back(std::move(v));
  }
  sub.pivots_ = pivots;
  return sub;
}

inline Subspace rref(std::span<const SympVector> rows) {
  if (rows.empty()) throw DimensionError("rref of an empty list needs (n, d)");
  return rref(rows, rows.front().n(), rows.front().d());
}

inline bool is_isotropic(const Subspace& sub) {
  const auto& b = sub.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      if (symplectic_value(b[i], b[j]) != 0) return false;
    }
  }
  return true;
}

// Basis of the symplectic complement { v : <v, w> = 0 for all w in rows }.
inline std::vector<SympVector> symplectic_complement(
    std::span<const SympVector> rows, std::size_t n, std::uint32_t d) {
  // <v, w> = v.x . w.z - v.z . w.x, linear in v's coordinates.
  detail::ModMatrix m(rows.size(), 2 * n, d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      m.at(i, s) = rows[i].z(s);
      m.at(i, n + s) = (d - rows[i].x(s)) % d;
    }
  }
  std::vector<SympVector> out;
  for (const auto& c : m.nullspace()) {
    SympVector v(n, d);
    for (std::size_t t = 0; t < 2 * n; ++t) v.set_coord(t, c[t]);
    out.push_back(std::move(v));
  }
  return out;
}

// Iterates shift + m over every m in a subspace, each element exactly once,
// in mixed-radix order of the basis coefficients.
class CosetRange {
 public:
  static constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 24;

  CosetRange(const Subspace& sub, SympVector shift,
             std::uint64_t budget = kDefaultBudget)
      : sub_(&sub), shift_(std::move(shift)) {
      const auto sz = sub.size();
      if (!sz || *sz > budget) {
        throw BudgetError("coset of rank " + std::to_string(sub.rank()) +
                          " exceeds enumeration budget");
      }
      if (sub.rank() > 0 && (shift_.n() != sub.ambient_n() ||
                             shift_.d() != sub.modulus())) {
        throw DimensionError("coset shift does not match subspace");
      }
      count_ = *sz;
  }

  class iterator {
   public:
    using value_type = SympVector;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;
    using reference = const SympVector&;
    using pointer = const SympVector*;

    iterator() = default;
    iterator(const Subspace* sub, SympVector start, std::uint64_t index)
        : sub_(sub), current_(std::move(start)), index_(index),
          digits_(sub ? sub->rank() : 0, 0) {}

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++() {
      ++index_;
      const auto d = sub_->modulus();
      for (std::size_t r = 0; r < digits_.size(); ++r) {
        current_ += sub_->basis()[r];
        if (++digits_[r] < d) break;
        digits_[r] = 0;  // wrapped: d additions returned this digit to zero
      }
      return *this;
    }
    void operator++(int) { ++*this; }
    bool operator==(const iterator& o) const { return index_ == o.index_; }

   private:
    const Subspace* sub_ = nullptr;
    SympVector current_;
    std::uint64_t index_ = 0;
    std::vector<std::uint32_t> digits_;
  };

  iterator begin() const { return iterator(sub_, shift_, 0); }
  iterator end() const { return iterator(nullptr, {}, count_); }
  std::uint64_t count() const { return count_; }

 private:
  const Subspace* sub_;
  SympVector shift_;
  std::uint64_t count_ = 1;
};

inline CosetRange coset_enumerate(const Subspace& sub, SympVector shift,
                                  std::uint64_t budget = CosetRange::kDefaultBudget) {
  return CosetRange(sub, std::move(shift), budget);
}

}  // namespace aqec
