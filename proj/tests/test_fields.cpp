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

#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "aqec/error.hpp"
#include "aqec/fields.hpp"
#include "aqec/rng.hpp"

using namespace aqec;

namespace {

SympVector random_vector(std::size_t n, std::uint32_t d, Rng& rng) {
  SympVector v(n, d);
  for (std::size_t t = 0; t < 2 * n; ++t) v.set_coord(t, static_cast<std::uint32_t>(rng() % d));
  return v;
}

// Plain Gaussian elimination without pivot normalization; only the rank is
// compared, so it shares no code with rref().
std::size_t naive_rank(std::vector<std::vector<std::int64_t>> m, std::int64_t d) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] % d == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      const std::int64_t a = m[rank][c], b = m[r][c];
      for (std::size_t j = 0; j < cols; ++j) m[r][j] = ((m[r][j] * a - m[rank][j] * b) % d + d) % d;
    }
    ++rank;
  }
  return rank;
}

std::vector<std::uint32_t> coords_of(const SympVector& v) {
  return {v.coords().begin(), v.coords().end()};
}

}  // namespace

TEST(FieldElement, ArithmeticModPrime) {
  FieldElement a(5, 7), b(4, 7);
  EXPECT_EQ((a + b).value(), 2u);
  EXPECT_EQ((a - b).value(), 1u);
  EXPECT_EQ((b - a).value(), 6u);
  EXPECT_EQ((a * b).value(), 6u);
  EXPECT_EQ((a * a.inverse()).value(), 1u);
  EXPECT_EQ((a / b * b).value(), a.value());
  EXPECT_EQ(FieldElement(9, 7).value(), 2u);
}

TEST(FieldElement, InverseIsExhaustive) {
  for (std::uint32_t d : {2u, 3u, 5u, 7u, 11u, 13u}) {
    for (std::uint32_t v = 1; v < d; ++v) {
      EXPECT_EQ((FieldElement(v, d) * FieldElement(v, d).inverse()).value(), 1u);
    }
  }
}

TEST(FieldElement, RejectsCompositeModulus) {
  EXPECT_THROW(FieldElement(1, 4), ValidationError);
  EXPECT_THROW(FieldElement(1, 9), ValidationError);
  EXPECT_THROW(FieldElement(1, 1), ValidationError);
  EXPECT_NO_THROW(FieldElement(1, 3));
}

TEST(FieldElement, MixedModuliThrow) {
  EXPECT_THROW(FieldElement(1, 3) + FieldElement(1, 5), DimensionError);
}

TEST(SympVector, ParseAndPrintRoundTrip) {
  const auto v = SympVector::parse("120|012", 3);
  EXPECT_EQ(v.n(), 3u);
  EXPECT_EQ(v.x(1), 2u);
  EXPECT_EQ(v.z(2), 2u);
  EXPECT_EQ(v.weight(), 3u);
  EXPECT_EQ(v.to_string(), "120|012");
  EXPECT_THROW(SympVector::parse("13|00", 3), ValidationError);
  EXPECT_THROW(SympVector::parse("1|00", 2), ValidationError);
}

TEST(SympVector, AdditionIsComponentwise) {
  auto a = SympVector::parse("12|21", 3);
  auto b = SympVector::parse("22|10", 3);
  EXPECT_EQ((a + b).to_string(), "01|01");
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_EQ((a + SympVector(2, 3)), a);
  EXPECT_EQ(a.scaled(2), a + a);
}

TEST(SymplecticForm, SpecExamples) {
  const auto x = SympVector::parse("1|0", 2);
  const auto z = SympVector::parse("0|1", 2);
  EXPECT_EQ(symplectic_form(x, z).value(), 1u);
  EXPECT_EQ(symplectic_form(x, x).value(), 0u);
  const auto a = SympVector::parse("12|00", 3);
  const auto b = SympVector::parse("00|11", 3);
  EXPECT_EQ(symplectic_form(a, b).value(), 0u);
}

TEST(SymplecticForm, MismatchThrows) {
  EXPECT_THROW(symplectic_form(SympVector(2, 2), SympVector(3, 2)), DimensionError);
  EXPECT_THROW(symplectic_form(SympVector(2, 2), SympVector(2, 3)), DimensionError);
}

TEST(SymplecticForm, AntisymmetricAndBilinearRandom) {
  Rng rng(11);
  for (std::uint32_t d : {2u, 3u, 5u}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_vector(6, d, rng);
      const auto b = random_vector(6, d, rng);
      const auto c = random_vector(6, d, rng);
      const std::uint32_t s = static_cast<std::uint32_t>(rng() % d);
      EXPECT_EQ(symplectic_form(a, a).value(), 0u);
      EXPECT_EQ(symplectic_form(a, b).value(), (-symplectic_form(b, a)).value());
      EXPECT_EQ(symplectic_form(a.scaled(s) + b, c).value(),
                (FieldElement(s, d) * symplectic_form(a, c) + symplectic_form(b, c)).value());
    }
  }
}

TEST(Rref, DuplicatesAndScalarMultiples) {
  const auto v = SympVector::parse("10|01", 2);
  std::vector<SympVector> dup{v, v};
  EXPECT_EQ(rref(dup).rank(), 1u);
  std::vector<SympVector> mult{SympVector::parse("10|00", 3), SympVector::parse("20|00", 3)};
  EXPECT_EQ(rref(mult).rank(), 1u);
  std::vector<SympVector> none;
  const auto zero = rref(none, 2, 3);
  EXPECT_EQ(zero.rank(), 0u);
  EXPECT_TRUE(zero.contains(SympVector(2, 3)));
}

TEST(Rref, RankMatchesNaiveElimination) {
  Rng rng(5);
  for (std::uint32_t d : {2u, 3u, 7u}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<SympVector> rows;
      std::vector<std::vector<std::int64_t>> m;
      const std::size_t count = 1 + rng() % 6;
      for (std::size_t r = 0; r < count; ++r) {
        // Low-rank mixtures exercise dependent rows.
        auto v = random_vector(4, d, rng);
        if (r >= 2 && rng() % 2 == 0) v = rows[0].scaled(1 + rng() % (d - 1)) + rows[1];
        rows.push_back(v);
        m.emplace_back(v.coords().begin(), v.coords().end());
      }
      EXPECT_EQ(rref(rows).rank(), naive_rank(m, d));
    }
  }
}

TEST(Rref, IdempotentAndSpanPreserving) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SympVector> rows;
    for (int r = 0; r < 5; ++r) rows.push_back(random_vector(3, 3, rng));
    const auto once = rref(rows);
    const auto twice = rref(once.basis());
    EXPECT_TRUE(once == twice);
    for (std::size_t i = 0; i < once.basis().size(); ++i) {
      EXPECT_EQ(once.basis()[i], twice.basis()[i]);
    }
    for (const auto& r : rows) EXPECT_TRUE(once.contains(r));
    // Membership agrees with a rank test.
    const auto probe = random_vector(3, 3, rng);
    auto ext = rows;
    ext.push_back(probe);
    EXPECT_EQ(once.contains(probe), rref(ext).rank() == once.rank());
  }
}

TEST(Rref, CoordinatesReconstruct) {
  Rng rng(21);
  std::vector<SympVector> rows;
  for (int r = 0; r < 4; ++r) rows.push_back(random_vector(4, 5, rng));
  const auto sub = rref(rows);
  SympVector v(4, 5);
  for (std::size_t i = 0; i < sub.rank(); ++i) v.add_scaled(sub.basis()[i], (i * 3 + 1) % 5);
  const auto c = sub.coordinates(v);
  SympVector back(4, 5);
  for (std::size_t i = 0; i < sub.rank(); ++i) back.add_scaled(sub.basis()[i], c[i]);
  EXPECT_EQ(back, v);
}

TEST(Isotropic, SpecExamples) {
  std::vector<SympVector> none;
  EXPECT_TRUE(is_isotropic(rref(none, 1, 2)));
  std::vector<SympVector> xz{SympVector::parse("1|0", 2), SympVector::parse("0|1", 2)};
  EXPECT_FALSE(is_isotropic(rref(xz)));
  std::vector<SympVector> rep{SympVector::parse("000|110", 2), SympVector::parse("000|011", 2)};
  EXPECT_TRUE(is_isotropic(rref(rep)));
}

TEST(SymplecticComplement, PairsToZeroWithRows) {
  Rng rng(3);
  std::vector<SympVector> rows{random_vector(3, 3, rng), random_vector(3, 3, rng)};
  const auto comp = symplectic_complement(rows, 3, 3);
  EXPECT_EQ(comp.size(), 6u - rref(rows).rank());
  for (const auto& c : comp) {
    for (const auto& r : rows) EXPECT_EQ(symplectic_value(c, r), 0u);
  }
}

TEST(CosetEnumerate, RankZeroYieldsShift) {
  std::vector<SympVector> none;
  const auto sub = rref(none, 2, 2);
  const auto shift = SympVector::parse("10|01", 2);
  std::vector<SympVector> got(coset_enumerate(sub, shift).begin(), coset_enumerate(sub, shift).end());
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0], shift);
}

TEST(CosetEnumerate, RepThreeCosetMatchesBruteForce) {
  const auto g1 = SympVector::parse("000|110", 2);
  const auto g2 = SympVector::parse("000|011", 2);
  std::vector<SympVector> gens{g1, g2};
  const auto sub = rref(gens);
  const auto shift = SympVector::parse("100|000", 2);
  std::set<std::vector<std::uint32_t>> expect;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) expect.insert(coords_of(shift + g1.scaled(a) + g2.scaled(b)));
  }
  std::set<std::vector<std::uint32_t>> got;
  for (const auto& v : coset_enumerate(sub, shift)) got.insert(coords_of(v));
  EXPECT_EQ(got, expect);
  EXPECT_EQ(coset_enumerate(sub, shift).count(), 4u);
}

TEST(CosetEnumerate, CosetsPartitionSpaceExhaustively) {
  Rng rng(17);
  for (auto [n, d] : {std::pair<std::size_t, std::uint32_t>{2, 2}, {2, 3}, {4, 2}}) {
    std::vector<SympVector> rows{random_vector(n, d, rng), random_vector(n, d, rng)};
    const auto sub = rref(rows);
    std::uint64_t total = 1;
    for (std::size_t t = 0; t < 2 * n; ++t) total *= d;
    std::set<std::vector<std::uint32_t>> seen;
    std::uint64_t cosets = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      SympVector v(n, d);
      std::uint64_t r = idx;
      for (std::size_t t = 0; t < 2 * n; ++t, r /= d) v.set_coord(t, static_cast<std::uint32_t>(r % d));
      if (seen.count(coords_of(v))) continue;
      ++cosets;
      std::uint64_t size = 0;
      for (const auto& w : coset_enumerate(sub, v)) {
        EXPECT_TRUE(seen.insert(coords_of(w)).second);
        EXPECT_TRUE(sub.contains(w - v));
        ++size;
      }
      EXPECT_EQ(size, *sub.size());
    }
    EXPECT_EQ(seen.size(), total);
    EXPECT_EQ(cosets * *sub.size(), total);
  }
}

TEST(CosetEnumerate, BudgetExceededThrows) {
  std::vector<SympVector> rows;
  for (std::size_t i = 0; i < 10; ++i) {
    SympVector v(10, 2);
    v.set_x(i, 1);
    rows.push_back(v);
  }
  const auto sub = rref(rows);
  EXPECT_THROW(coset_enumerate(sub, SympVector(10, 2), 512), BudgetError);
  EXPECT_NO_THROW(coset_enumerate(sub, SympVector(10, 2), 1024));
}
