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

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "aqec/bounds.hpp"
#include "aqec/codes.hpp"
#include "aqec/exactkl.hpp"
#include "aqec/pipeline.hpp"
#include "aqec/linalg.hpp"
#include "aqec/noise.hpp"
#include "aqec/rng.hpp"

using namespace aqec;

namespace {

// Single-site Weyl matrix with the documented phase, built from X and Z.
CMatrix site_weyl(std::uint32_t x, std::uint32_t z, std::uint32_t d) {
  const auto D = static_cast<Eigen::Index>(d);
  CMatrix X = CMatrix::Zero(D, D), Z = CMatrix::Zero(D, D);
  for (Eigen::Index j = 0; j < D; ++j) {
    X((j + 1) % D, j) = 1.0;
    Z(j, j) = std::polar(1.0, 2 * std::numbers::pi * double(j) / d);
  }
  CMatrix m = CMatrix::Identity(D, D);
  for (std::uint32_t a = 0; a < x; ++a) m = X * m;
  CMatrix zz = CMatrix::Identity(D, D);
  for (std::uint32_t b = 0; b < z; ++b) zz = Z * zz;
  m = m * zz;
  Complex phase;
  if (d == 2) {
    phase = (x * z != 0) ? Complex(0, 1) : Complex(1, 0);
  } else {
    const std::uint32_t half = (d + 1) / 2;  // 2^{-1} mod d
    phase = std::polar(1.0, -2 * std::numbers::pi * double(half * x * z % d) / d);
  }
  return phase * m;
}

// Qudit i is the i-th least significant digit of the basis index.
CMatrix weyl_matrix(const SympVector& eta) {
  CMatrix m = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < eta.n(); ++i) {
    const CMatrix s = site_weyl(eta.x(i), eta.z(i), eta.d());
    CMatrix k(s.rows() * m.rows(), s.cols() * m.cols());
    for (Eigen::Index a = 0; a < s.rows(); ++a) {
      for (Eigen::Index b = 0; b < s.cols(); ++b) k.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = s(a, b) * m;
    }
    m = k;
  }
  return m;
}

SympVector random_vector(std::size_t n, std::uint32_t d, Rng& rng) {
  SympVector v(n, d);
  for (std::size_t t = 0; t < 2 * n; ++t) v.set_coord(t, static_cast<std::uint32_t>(rng() % d));
  return v;
}

CVector random_state(std::uint64_t dim, Rng& rng) {
  CVector v(static_cast<Eigen::Index>(dim));
  for (auto& a : v) a = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
  return v.normalized();
}

// Pr(s, l) by exhaustive enumeration of every Kraus label.
std::map<std::vector<std::uint32_t>, std::vector<double>> brute_class_table(
    const StabilizerCode& code, const KrausSet& ks) {
  std::map<std::vector<std::uint32_t>, std::vector<double>> t;
  for (const auto& term : ks.terms) {
    const auto dec = decompose(code, term.eta);
    auto& row = t[dec.syndrome];
    row.resize(code.num_classes(), 0.0);
    row[code.class_index(dec.logical_class)] += term.amplitude * term.amplitude;
  }
  return t;
}

double brute_conditional_entropy(const StabilizerCode& code, const KrausSet& ks) {
  double h = 0.0;
  for (const auto& [s, row] : brute_class_table(code, ks)) {
    double ps = 0.0;
    for (double v : row) ps += v;
    for (double v : row) {
      if (v > 0) h -= v * std::log(v / ps);
    }
  }
  return h;
}

double brute_renyi(const StabilizerCode& code, const KrausSet& ks, int R) {
  double num = 0.0, den = 0.0;
  for (const auto& [s, row] : brute_class_table(code, ks)) {
    double ps = 0.0;
    for (double v : row) {
      ps += v;
      den += std::pow(v, R);
    }
    num += std::pow(ps, R);
  }
  return std::log(num / den) / (R - 1);
}

// (1/K) <q1| E_u^dag E_v |q2> straight from the definition.
CMatrix direct_full(const CodeBasis& basis, const KrausSet& ks) {
  const auto K = static_cast<Eigen::Index>(basis.K());
  const auto U = static_cast<Eigen::Index>(ks.size());
  CMatrix cols(static_cast<Eigen::Index>(basis.dim()), U * K);
  for (Eigen::Index u = 0; u < U; ++u) {
    const CMatrix e = ks.terms[u].amplitude * weyl_matrix(ks.terms[u].eta);
    cols.middleCols(u * K, K) = e * basis.words;
  }
  return cols.adjoint() * cols / double(K);
}

StabilizerCode qutrit_repetition() {
  std::vector<SympVector> gens{SympVector::parse("000|120", 3), SympVector::parse("000|012", 3)};
  return make_custom(gens, {}, "rep-3-d3");
}

struct Instance {
  StabilizerCode code;
  KrausSet kraus;
};

std::vector<Instance> small_instances() {
  std::vector<Instance> out;
  for (double p : {0.05, 0.1, 0.3}) {
    out.push_back({make_repetition(3), kraus_enumerate(bit_flip(3, p))});
    out.push_back({make_repetition(3), kraus_enumerate(depolarizing(3, p))});
    out.push_back({make_five_qubit(), kraus_enumerate(depolarizing(5, p))});
    out.push_back({qutrit_repetition(), kraus_enumerate(depolarizing(3, p, 3))});
  }
  out.push_back({make_toric(2), kraus_enumerate(bit_flip(8, 0.1))});
  return out;
}

}  // namespace

TEST(Weyl, MatchesKroneckerOracle) {
  Rng rng(8);
  for (std::uint32_t d : {2u, 3u, 5u}) {
    const std::size_t n = d == 5 ? 2 : 3;
    for (int trial = 0; trial < 20; ++trial) {
      const auto eta = random_vector(n, d, rng);
      const CVector psi = random_state(hilbert_dimension(n, d), rng);
      DenseState s{psi, n, d};
      const auto out = weyl_apply(eta, s);
      EXPECT_LT((out.amplitudes - weyl_matrix(eta) * psi).norm(), 1e-12);
      EXPECT_NEAR(out.norm(), 1.0, 1e-12);
    }
  }
}

TEST(Weyl, IdentityAndBitFlip) {
  const auto zero = DenseState::basis_state(1, 2, 0);
  EXPECT_LT((weyl_apply(SympVector(1, 2), zero).amplitudes - zero.amplitudes).norm(), 1e-15);
  const auto one = weyl_apply(SympVector::parse("1|0", 2), zero);
  EXPECT_NEAR(std::abs(one.amplitudes(1)), 1.0, 1e-15);
}

TEST(Weyl, ProjectiveRepresentation) {
  Rng rng(12);
  for (std::uint32_t d : {2u, 3u}) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto a = random_vector(2, d, rng);
      const auto b = random_vector(2, d, rng);
      const CMatrix ab = weyl_matrix(a) * weyl_matrix(b);
      const CMatrix sum = weyl_matrix(a + b);
      const Complex phase = (sum.adjoint() * ab).trace() / double(sum.rows());
      EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
      EXPECT_LT((ab - phase * sum).norm(), 1e-12);
    }
  }
}

TEST(Codewords, RepThreeSpansZeroAndOneStrings) {
  const auto basis = build_codewords(make_repetition(3));
  ASSERT_EQ(basis.K(), 2u);
  EXPECT_NEAR(std::abs(basis.words(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(basis.words(7, 1)), 1.0, 1e-12);
  EXPECT_LT(basis.orthonormality_error(), 1e-12);
  const CMatrix zbar = weyl_matrix(make_repetition(3).logicals()[1]);
  const CMatrix zl = basis.words.adjoint() * zbar * basis.words;
  EXPECT_NEAR(std::abs(zl(0, 1)), 0.0, 1e-12);
}

TEST(Codewords, StabilizedAndProjectorTrace) {
  for (const auto& code : {make_five_qubit(), make_toric(2), qutrit_repetition(), make_toric_qudit(2, 3)}) {
    const auto basis = build_codewords(code);
    EXPECT_EQ(basis.K(), code.K());
    EXPECT_LT(basis.orthonormality_error(), 1e-10) << code.name();
    const CMatrix P = basis.words * basis.words.adjoint();
    EXPECT_NEAR(P.trace().real(), double(code.K()), 1e-10);
    for (const auto& g : code.generators()) {
      const CMatrix gw = weyl_apply_columns(g, basis.words);
      EXPECT_LT((gw - basis.words).norm(), 1e-10) << code.name();
    }
  }
}

TEST(Codewords, BudgetExceededThrows) {
  EXPECT_THROW(build_codewords(make_toric(3), 1 << 10), BudgetError);
}

TEST(Gram, IdentityChannelIsExact) {
  const auto basis = build_codewords(make_five_qubit());
  KrausSet id;
  id.terms.push_back({SympVector(5, 2), 1.0});
  id.captured_mass = 1.0;
  const auto pair = build_gram(basis, id);
  EXPECT_LT((pair.dense_full() - pair.dense_lambda()).norm(), 1e-12);
  EXPECT_LT((pair.dense_full() - CMatrix::Identity(2, 2) / 2.0).norm(), 1e-12);
}

TEST(Gram, MatchesDirectDefinition) {
  for (const auto& inst : small_instances()) {
    const auto basis = build_codewords(inst.code);
    const auto pair = build_gram(basis, inst.kraus);
    const CMatrix direct = direct_full(basis, inst.kraus);
    EXPECT_LT((pair.dense_full() - direct).cwiseAbs().maxCoeff(), 1e-12) << inst.code.name();
    EXPECT_NEAR(pair.dense_full().trace().real(), inst.kraus.captured_mass, 1e-10);
  }
}

TEST(Gram, InvariantsHoldOnAllInstances) {
  for (const auto& inst : small_instances()) {
    const auto pair = build_gram(build_codewords(inst.code), inst.kraus);
    const auto rep = check_gram_invariants(pair);
    EXPECT_TRUE(rep.ok(1e-8)) << inst.code.name();
    EXPECT_NEAR(rep.trace_full, inst.kraus.captured_mass, 1e-8);
    EXPECT_NEAR(rep.trace_lambda, inst.kraus.captured_mass, 1e-8);
  }
}

TEST(Gram, RepThreeHasOffBlockEntries) {
  const auto code = make_repetition(3);
  const auto pair = build_gram(build_codewords(code), kraus_enumerate(bit_flip(3, 0.1)));
  EXPECT_GT((pair.dense_full() - pair.dense_lambda()).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_NEAR(pair.dense_full().trace().real(), 1.0, 1e-12);
}

TEST(Gram, IndexBudgetThrows) {
  const auto basis = build_codewords(make_five_qubit());
  EXPECT_THROW(build_gram(basis, kraus_enumerate(depolarizing(5, 0.1)), 64), BudgetError);
}

TEST(RelativeEntropy, ClosedForms) {
  CMatrix rho(2, 2);
  rho << 0.75, 0.0, 0.0, 0.25;
  const CMatrix sigma = CMatrix::Identity(2, 2) * 0.5;
  EXPECT_NEAR(relative_entropy(rho, rho).value, 0.0, 1e-14);
  EXPECT_NEAR(relative_entropy(rho, sigma).value, 0.75 * std::log(1.5) + 0.25 * std::log(0.5), 1e-14);
  EXPECT_NEAR(relative_entropy(rho, sigma).value, 0.1308120, 1e-6);
}

TEST(RelativeEntropy, SupportViolationIsInfinite) {
  CMatrix rho = CMatrix::Identity(2, 2) * 0.5;
  CMatrix pure = CMatrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  const auto r = relative_entropy(rho, pure);
  EXPECT_FALSE(r.finite);
  EXPECT_TRUE(std::isinf(r.value));
  EXPECT_NEAR(r.outside_support, 0.5, 1e-12);
}

// S(Lambda+B || Lambda) equals the conditional class entropy computed by
// exhaustive enumeration of Pr(s, l).
TEST(AqecEntropy, EqualsBruteForceClassEntropy) {
  for (const auto& inst : small_instances()) {
    const auto pair = build_gram(build_codewords(inst.code), inst.kraus);
    const auto S = aqec_relative_entropy(pair);
    ASSERT_TRUE(S.finite);
    EXPECT_NEAR(S.value, brute_conditional_entropy(inst.code, inst.kraus), 1e-9) << inst.code.name();
    EXPECT_GE(S.value, -1e-8);
    EXPECT_LE(S.value, 2 * std::log(double(inst.code.K())) + 1e-8);
  }
}

TEST(AqecEntropy, MergedKrausGivesSameEntropy) {
  for (const auto& inst : small_instances()) {
    const auto basis = build_codewords(inst.code);
    const auto merged = merge_equivalent_kraus(basis, inst.kraus);
    EXPECT_LE(merged.size(), inst.kraus.size());
    EXPECT_NEAR(merged.captured_mass, inst.kraus.captured_mass, 1e-12);
    EXPECT_NEAR(aqec_relative_entropy(build_gram(basis, merged)).value,
                aqec_relative_entropy(build_gram(basis, inst.kraus)).value, 1e-10);
  }
}

TEST(AqecEntropy, KrausPhaseInvariance) {
  Rng rng(31);
  const auto basis = build_codewords(make_repetition(3));
  const auto pair = build_gram(basis, kraus_enumerate(depolarizing(3, 0.2)));
  const CMatrix full = pair.dense_full(), lambda = pair.dense_lambda();
  const std::size_t K = pair.K;
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix D = CMatrix::Zero(full.rows(), full.cols());
    for (std::size_t u = 0; u < pair.num_errors; ++u) {
      const Complex ph = std::polar(1.0, 2 * std::numbers::pi * uniform01(rng));
      for (std::size_t q = 0; q < K; ++q) D(u * K + q, u * K + q) = ph;
    }
    const CMatrix f2 = D.adjoint() * full * D, l2 = D.adjoint() * lambda * D;
    EXPECT_NEAR(relative_entropy(f2, l2).value, relative_entropy(full, lambda).value, 1e-10);
    const auto tr2 = [](const CMatrix& m) { return (m * m).trace().real(); };
    EXPECT_NEAR(std::log(tr2(f2) / tr2(l2)), renyi_ratio(pair, 2), 1e-10);
  }
}

TEST(Renyi, ExactCodeGivesZero) {
  const auto code = make_five_qubit();
  const auto pair = build_gram(build_codewords(code), kraus_enumerate(depolarizing(5, 0.1), 1));
  for (int R : {2, 3, 4}) EXPECT_NEAR(renyi_ratio(pair, R), 0.0, 1e-10);
}

TEST(Renyi, MatchesClassSumsOnAllInstances) {
  for (const auto& inst : small_instances()) {
    const auto pair = build_gram(build_codewords(inst.code), inst.kraus);
    for (int R : {2, 3}) {
      EXPECT_NEAR(renyi_ratio(pair, R), brute_renyi(inst.code, inst.kraus, R), 1e-8)
          << inst.code.name() << " R=" << R;
    }
  }
}

TEST(Renyi, TrendTowardRelativeEntropy) {
  const auto code = make_repetition(3);
  const auto pair = build_gram(build_codewords(code), kraus_enumerate(bit_flip(3, 0.1)));
  const double S = aqec_relative_entropy(pair).value;
  const double r2 = renyi_ratio(pair, 2), r3 = renyi_ratio(pair, 3), r4 = renyi_ratio(pair, 4);
  // Reported rather than asserted tightly: the integer-R values move
  // monotonically and S lies on the R -> 1 side of them.
  RecordProperty("S", std::to_string(S));
  RecordProperty("R2", std::to_string(r2));
  EXPECT_TRUE((r2 - r3) * (r3 - r4) >= 0);
  EXPECT_TRUE((S - r2) * (r2 - r3) >= 0);
}

TEST(ExactKl, DetectorImpliesZeroEntropy) {
  struct Case {
    StabilizerCode code;
    KrausSet kraus;
    bool exact;
  };
  std::vector<Case> cases{
      {make_five_qubit(), kraus_enumerate(depolarizing(5, 0.1), 1), true},
      {make_repetition(3), kraus_enumerate(bit_flip(3, 0.2), 1), true},
      {make_repetition(5), kraus_enumerate(bit_flip(5, 0.2), 2), true},
      {make_repetition(3), kraus_enumerate(bit_flip(3, 0.2)), false},
      {make_toric(2), kraus_enumerate(depolarizing(8, 0.1), 1), false},
  };
  for (const auto& c : cases) {
    const auto basis = build_codewords(c.code);
    EXPECT_EQ(exact_kl_holds(basis, c.kraus), c.exact) << c.code.name();
    const double S = aqec_relative_entropy(build_gram(basis, c.kraus)).value;
    if (c.exact) {
      EXPECT_LE(std::abs(S), 1e-10);
    } else {
      EXPECT_GT(S, 1e-6);
    }
  }
}

TEST(Petz, IdentityChannelRecoversPerfectly) {
  const auto basis = build_codewords(make_repetition(3));
  KrausSet id;
  id.terms.push_back({SympVector(3, 2), 1.0});
  const auto rec = petz_recovery(basis, id);
  const auto dense = rec.dense_kraus(basis);
  ASSERT_EQ(dense.size(), 1u);
  const CMatrix P = basis.words * basis.words.adjoint();
  EXPECT_LT((dense[0] - P).norm(), 1e-10);
  EXPECT_NEAR(entanglement_fidelity(basis, id, rec), 1.0, 1e-12);
}

TEST(Petz, ExactKlInputIsInverted) {
  const auto basis = build_codewords(make_five_qubit());
  const auto ks = kraus_enumerate(depolarizing(5, 0.1), 1);
  const auto rec = petz_recovery(basis, ks);
  EXPECT_LT(rec.completeness_defect, 1e-8);
  EXPECT_NEAR(entanglement_fidelity(basis, ks, rec) / ks.captured_mass, 1.0, 1e-8);
}

TEST(Petz, FidelityRoutesAgreeAndBoundHolds) {
  for (const auto& inst : small_instances()) {
    const auto basis = build_codewords(inst.code);
    const auto rec = petz_recovery(basis, inst.kraus);
    EXPECT_LT(rec.completeness_defect, 1e-8);
    const double fe = entanglement_fidelity(basis, inst.kraus, rec);
    EXPECT_NEAR(fe, entanglement_fidelity(basis, inst.kraus, rec.dense_kraus(basis)), 1e-10);
    const double S = aqec_relative_entropy(build_gram(basis, inst.kraus)).value;
    const auto rep = check_bounds_thm1(S, fe, double(inst.code.K()));
    EXPECT_TRUE(rep.ok) << inst.code.name() << " " << rep.describe();
  }
}

TEST(EntanglementFidelity, ClosedForms) {
  const CMatrix I = CMatrix::Identity(2, 2);
  CMatrix Z = CMatrix::Identity(2, 2);
  Z(1, 1) = -1;
  EXPECT_NEAR(entanglement_fidelity({I}), 1.0, 1e-15);
  EXPECT_NEAR(entanglement_fidelity({I * std::sqrt(0.5), Z * std::sqrt(0.5)}), 0.5, 1e-15);
  const double p = 0.3;
  EXPECT_NEAR(entanglement_fidelity({I * std::sqrt(1 - p), Z * std::sqrt(p)}), 1 - p, 1e-15);
}

TEST(Bounds, TightAtZero) {
  const auto rep = check_bounds_thm1(0.0, 1.0, 2.0);
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.petz_lower_slack, 0.0, 1e-15);
  EXPECT_NEAR(rep.converse_slack, 0.0, 1e-15);
}

TEST(Bounds, RepetitionInstancesHold) {
  for (auto [n, p] : {std::pair<std::size_t, double>{3, 0.1}, {5, 0.3}}) {
    const auto code = make_repetition(n);
    const auto basis = build_codewords(code);
    const auto ks = kraus_enumerate(bit_flip(n, p));
    const double S = aqec_relative_entropy(build_gram(basis, ks)).value;
    const double fe = entanglement_fidelity(basis, ks, petz_recovery(basis, ks));
    const auto rep = check_bounds_thm1(S, fe, 2.0);
    EXPECT_TRUE(rep.ok) << rep.describe();
    EXPECT_GT(rep.petz_lower_slack, 0.0);
    EXPECT_GT(rep.converse_slack, 0.0);
  }
}

TEST(Bounds, ViolationIsReported) {
  const auto rep = check_bounds_thm1(0.5, 0.99, 2.0);
  EXPECT_FALSE(rep.ok);
  EXPECT_LT(rep.converse_slack, 0.0);
}

TEST(CoherentInformation, ExactAndIdentityGiveLnK) {
  const auto basis = build_codewords(make_five_qubit());
  const auto ks = kraus_enumerate(depolarizing(5, 0.1), 1);
  // Renormalize the truncated set so the channel is trace preserving.
  KrausSet norm = ks;
  for (auto& t : norm.terms) t.amplitude /= std::sqrt(ks.captured_mass);
  norm.captured_mass = 1.0;
  EXPECT_NEAR(coherent_information(basis, norm).value, std::log(2.0), 1e-10);
  KrausSet id;
  id.terms.push_back({SympVector(5, 2), 1.0});
  EXPECT_NEAR(coherent_information(basis, id).value, std::log(2.0), 1e-12);
}

TEST(CoherentInformation, ComplementsRelativeEntropy) {
  for (const auto& inst : small_instances()) {
    const auto basis = build_codewords(inst.code);
    const double S = aqec_relative_entropy(build_gram(basis, inst.kraus)).value;
    const double ic = coherent_information(basis, inst.kraus).value;
    EXPECT_NEAR(S, std::log(double(inst.code.K())) - ic, 1e-9) << inst.code.name();
  }
}

TEST(Pipeline, TruncatedSetReportsConditionedFidelity) {
  const auto a = analyze_dense(make_five_qubit(), depolarizing(5, 0.1), 1);
  const double mass = std::pow(0.9, 5) + 5 * 0.1 * std::pow(0.9, 4);
  EXPECT_NEAR(a.kraus_mass, mass, 1e-12);
  EXPECT_NEAR(a.petz_fidelity_raw, mass, 1e-10);
  EXPECT_NEAR(a.petz_fidelity, 1.0, 1e-8);
  EXPECT_LE(a.relative_entropy.value, 1e-10);
  const auto full = analyze_dense(make_repetition(3), bit_flip(3, 0.1));
  EXPECT_NEAR(full.petz_fidelity, full.petz_fidelity_raw, 1e-12);
}
