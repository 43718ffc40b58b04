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

// Dense state-vector route to the approximate-QEC quantities: code words,
// the Gram pair (Lambda + B, Lambda) of the generalized Knill-Laflamme
// condition, its relative entropy and Renyi ratios, the transpose (Petz)
// recovery, entanglement fidelity and coherent information.
//
// Weyl phase convention: T(x, z) = i^{x.z} X^x Z^z for d = 2 and
// T(x, z) = w^{-(x.z)/2} X^x Z^z for odd d, w = exp(2 pi i / d), with
// X|j> = |j+1>, Z|j> = w^j |j>. Basis index j = sum_i j_i d^i.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqec/codes.hpp"
#include "aqec/error.hpp"
#include "aqec/fields.hpp"
#include "aqec/linalg.hpp"
#include "aqec/noise.hpp"

namespace aqec {

inline constexpr std::uint64_t kDefaultDenseBudget = std::uint64_t{1} << 20;
inline constexpr std::size_t kDefaultGramIndexBudget = 8192;

inline std::uint64_t hilbert_dimension(std::size_t n, std::uint32_t d,
                                       std::uint64_t budget = kDefaultDenseBudget) {
  std::uint64_t dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    dim *= d;
    if (dim > budget) {
      throw BudgetError("state vector of " + std::to_string(n) + " qudits exceeds dense budget");
    }
  }
  return dim;
}

struct DenseState {
  CVector amplitudes;
  std::size_t n = 0;
  std::uint32_t d = 2;

  static DenseState basis_state(std::size_t n, std::uint32_t d, std::uint64_t index) {
    DenseState s{CVector::Zero(static_cast<Eigen::Index>(hilbert_dimension(n, d))), n, d};
    s.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
    return s;
  }
  double norm() const { return amplitudes.norm(); }
  void normalize() {
    const double nm = norm();
    if (nm == 0.0) throw DegenerateInputError("cannot normalize the zero vector");
    amplitudes /= nm;
  }
};

namespace detail {

inline Complex weyl_global_phase(const SympVector& eta) {
  const std::uint32_t d = eta.d();
  std::uint64_t xz = 0;
  for (std::size_t i = 0; i < eta.n(); ++i) xz += static_cast<std::uint64_t>(eta.x(i)) * eta.z(i);
  if (d == 2) {
    static const Complex kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kPowI[xz % 4];
  }
  const std::uint32_t half = mod_inverse(2, d);
  const std::uint64_t e = (d - (xz % d) * half % d) % d;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / d);
}

// out = T(eta) in, both of length d^n.
inline void weyl_apply_raw(const SympVector& eta, const Complex* in, Complex* out,
                           std::uint64_t dim) {
  const Complex phase = weyl_global_phase(eta);
  const std::size_t n = eta.n();
  const std::uint32_t d = eta.d();
  if (d == 2 && n < 64) {
    std::uint64_t xm = 0;
    std::uint64_t zm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      xm |= static_cast<std::uint64_t>(eta.x(i)) << i;
      zm |= static_cast<std::uint64_t>(eta.z(i)) << i;
    }
    for (std::uint64_t j = 0; j < dim; ++j) {
      const bool neg = (std::popcount(j & zm) & 1) != 0;
      out[j ^ xm] = neg ? -phase * in[j] : phase * in[j];
    }
    return;
  }
  std::vector<Complex> roots(d);
  for (std::uint32_t k = 0; k < d; ++k) {
    roots[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / d);
  }
  std::vector<std::uint32_t> digits(n, 0);
  for (std::uint64_t j = 0; j < dim; ++j) {
    std::uint64_t target = 0;
    std::uint64_t place = 1;
    std::uint64_t zj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      target += ((digits[i] + eta.x(i)) % d) * place;
      zj += static_cast<std::uint64_t>(eta.z(i)) * digits[i];
      place *= d;
    }
    out[target] = phase * roots[zj % d] * in[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (++digits[i] < d) break;
      digits[i] = 0;
    }
  }
}

}  // namespace detail

inline DenseState weyl_apply(const SympVector& eta, const DenseState& state) {
  if (eta.n() != state.n || eta.d() != state.d) throw DimensionError("Weyl label/state mismatch");
  DenseState out{CVector(state.amplitudes.size()), state.n, state.d};
  detail::weyl_apply_raw(eta, state.amplitudes.data(), out.amplitudes.data(),
                         static_cast<std::uint64_t>(state.amplitudes.size()));
  return out;
}

// T(eta) applied to every column.
inline CMatrix weyl_apply_columns(const SympVector& eta, const CMatrix& cols) {
  CMatrix out(cols.rows(), cols.cols());
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    detail::weyl_apply_raw(eta, cols.col(c).data(), out.col(c).data(),
                           static_cast<std::uint64_t>(cols.rows()));
  }
  return out;
}

enum class CodeSource { kPerfectStabilizer, kImperfect };

// Orthonormal code words as the columns of a d^n x K matrix.
struct CodeBasis {
  CMatrix words;
  std::size_t n = 0;
  std::uint32_t d = 2;
  CodeSource source = CodeSource::kPerfectStabilizer;
  double beta = 0.0;  // preparation strength for kImperfect

  std::size_t K() const { return static_cast<std::size_t>(words.cols()); }
  std::uint64_t dim() const { return static_cast<std::uint64_t>(words.rows()); }
  DenseState word(std::size_t q) const {
    return {words.col(static_cast<Eigen::Index>(q)), n, d};
  }
  // Largest deviation of the word Gram matrix from the identity.
  double orthonormality_error() const {
    const CMatrix g = words.adjoint() * words;
    return (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  }
};

namespace detail {

// v <- (1/d) sum_c T(g)^c v, the projector onto the +1 eigenspace of T(g).
inline void project_plus_one(const SympVector& g, CVector& v) {
  CVector acc = v;
  CVector power = v;
  CVector next(v.size());
  for (std::uint32_t c = 1; c < g.d(); ++c) {
    weyl_apply_raw(g, power.data(), next.data(), static_cast<std::uint64_t>(v.size()));
    power.swap(next);
    acc += power;
  }
  v = acc / static_cast<double>(g.d());
}

}  // namespace detail

// Words |q> = prod_i T(Xbar_i)^{q_i} |psi_0>, where |psi_0> is the common +1
// eigenvector of all generators and all Zbar_i, projected from the first
// computational basis state with nonzero overlap.
inline CodeBasis build_codewords(const StabilizerCode& code,
                                 std::uint64_t budget = kDefaultDenseBudget) {
  const std::uint64_t dim = hilbert_dimension(code.n(), code.d(), budget);
  std::vector<SympVector> projectors = code.generators();
  for (std::size_t i = 0; i < code.k(); ++i) projectors.push_back(code.logicals()[2 * i + 1]);
  CVector psi;
  for (std::uint64_t anchor = 0; anchor < dim; ++anchor) {
    psi = CVector::Zero(static_cast<Eigen::Index>(dim));
    psi(static_cast<Eigen::Index>(anchor)) = 1.0;
    for (const auto& g : projectors) detail::project_plus_one(g, psi);
    if (psi.norm() > 1e-6) break;
  }
  if (psi.norm() <= 1e-6) throw ValidationError("stabilizer group has no +1 eigenvector");
  psi.normalize();
  CodeBasis basis;
  basis.n = code.n();
  basis.d = code.d();
  const auto K = static_cast<Eigen::Index>(code.K());
  basis.words.resize(static_cast<Eigen::Index>(dim), K);
  CVector tmp(psi.size());
  for (Eigen::Index q = 0; q < K; ++q) {
    CVector w = psi;
    auto rest = static_cast<std::uint64_t>(q);
    for (std::size_t i = 0; i < code.k(); ++i) {
      const auto power = static_cast<std::uint32_t>(rest % code.d());
      rest /= code.d();
      for (std::uint32_t c = 0; c < power; ++c) {
        detail::weyl_apply_raw(code.logicals()[2 * i], w.data(), tmp.data(), dim);
        w.swap(tmp);
      }
    }
    basis.words.col(q) = w;
  }
  return basis;
}

// Collapses Kraus terms whose restrictions T(eta) P agree up to a phase into
// one term with amplitude sqrt(sum of probabilities). The channel restricted
// to the code space is unchanged, so every quantity derived from the Gram pair
// is unchanged. Terms whose restrictions hash apart are simply kept separate.
inline KrausSet merge_equivalent_kraus(const CodeBasis& basis, const KrausSet& kraus) {
  struct Rep {
    std::size_t term;
    CMatrix normalized;
    double prob;
  };
  std::vector<Rep> reps;
  std::unordered_multimap<std::size_t, std::size_t> by_hash;
  for (std::size_t t = 0; t < kraus.terms.size(); ++t) {
    const auto& term = kraus.terms[t];
    if (term.amplitude == 0.0) continue;
    CMatrix m = weyl_apply_columns(term.eta, basis.words);
    const Complex* data = m.data();
    const auto size = m.size();
    Eigen::Index lead = 0;
    while (lead < size && std::abs(data[lead]) < 1e-6) ++lead;
    if (lead == size) continue;
    m *= std::abs(data[lead]) / data[lead];
    std::size_t h = static_cast<std::size_t>(lead);
    for (Eigen::Index i = 0; i < size; ++i) {
      const auto re = static_cast<long long>(std::llround(data[i].real() * 1e7));
      const auto im = static_cast<long long>(std::llround(data[i].imag() * 1e7));
      h = h * 1000003u ^ std::hash<long long>{}(re * 31 + im);
    }
    const double p = term.amplitude * term.amplitude;
    bool merged = false;
    auto [lo, hi] = by_hash.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      Rep& r = reps[it->second];
      if ((r.normalized - m).cwiseAbs().maxCoeff() < 1e-9) {
        r.prob += p;
        merged = true;
        break;
      }
    }
    if (!merged) {
      by_hash.emplace(h, reps.size());
      reps.push_back({t, std::move(m), p});
    }
  }
  KrausSet out;
  out.captured_mass = kraus.captured_mass;
  for (const auto& r : reps) out.terms.push_back({kraus.terms[r.term].eta, std::sqrt(r.prob)});
  return out;
}

// Columns E_u |q> for every Kraus term u, as one d^n x K block per term.
inline std::vector<CMatrix> kraus_images(const CodeBasis& basis, const KrausSet& kraus) {
  std::vector<CMatrix> out;
  out.reserve(kraus.terms.size());
  for (const auto& t : kraus.terms) {
    out.push_back(t.amplitude * weyl_apply_columns(t.eta, basis.words));
  }
  return out;
}

// One connected block of the Gram pair. Local index = position in `errors`
// times K plus the code-word index.
struct GramBlock {
  std::vector<std::size_t> errors;
  CMatrix full;    // Lambda + B
  CMatrix lambda;  // Lambda
};

// (Lambda + B)[(u,q1),(v,q2)] = <q1|E_u^dag E_v|q2> / K and
// Lambda[(u,q1),(v,q2)] = lambda_uv delta_{q1 q2} / K with
// lambda_uv = sum_q <q|E_u^dag E_v|q> / K, stored as the diagonal blocks of a
// direct sum over groups of error indices that never overlap.
struct GramPair {
  std::size_t K = 1;
  std::size_t num_errors = 0;
  double kraus_mass = 1.0;
  std::vector<GramBlock> blocks;

  std::size_t index_size() const { return num_errors * K; }

  CMatrix dense(bool full) const {
    const auto N = static_cast<Eigen::Index>(index_size());
    CMatrix out = CMatrix::Zero(N, N);
    for (const auto& b : blocks) {
      const auto& m = full ? b.full : b.lambda;
      for (std::size_t i = 0; i < b.errors.size(); ++i) {
        for (std::size_t j = 0; j < b.errors.size(); ++j) {
          for (std::size_t q1 = 0; q1 < K; ++q1) {
            for (std::size_t q2 = 0; q2 < K; ++q2) {
              out(static_cast<Eigen::Index>(b.errors[i] * K + q1),
                  static_cast<Eigen::Index>(b.errors[j] * K + q2)) =
                  m(static_cast<Eigen::Index>(i * K + q1), static_cast<Eigen::Index>(j * K + q2));
            }
          }
        }
      }
    }
    return out;
  }
  CMatrix dense_full() const { return dense(true); }
  CMatrix dense_lambda() const { return dense(false); }
};

inline GramPair build_gram(const CodeBasis& basis, const KrausSet& kraus,
                           std::size_t max_index = kDefaultGramIndexBudget) {
  const std::size_t K = basis.K();
  const std::size_t U = kraus.terms.size();
  if (U * K > max_index) {
    throw BudgetError("Gram index size " + std::to_string(U * K) + " exceeds budget " +
                      std::to_string(max_index));
  }
  const auto images = kraus_images(basis, kraus);
  const auto dim = static_cast<Eigen::Index>(basis.dim());

  // Error indices whose images share support belong to the same block.
  detail::UnionFind uf(U);
  std::vector<std::size_t> owner(static_cast<std::size_t>(dim), U);
  for (std::size_t u = 0; u < U; ++u) {
    const double cut = 1e-14 * std::max(1e-300, images[u].cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (images[u].row(j).cwiseAbs().maxCoeff() <= cut) continue;
      auto& o = owner[static_cast<std::size_t>(j)];
      if (o == U) {
        o = u;
      } else {
        uf.unite(o, u);
      }
    }
  }

  GramPair pair;
  pair.K = K;
  pair.num_errors = U;
  pair.kraus_mass = kraus.captured_mass;
  const double invK = 1.0 / static_cast<double>(K);
  for (auto& errors : uf.groups()) {
    const auto b = static_cast<Eigen::Index>(errors.size() * K);
    CMatrix A(dim, b);
    for (std::size_t i = 0; i < errors.size(); ++i) {
      A.middleCols(static_cast<Eigen::Index>(i * K), static_cast<Eigen::Index>(K)) =
          images[errors[i]];
    }
    GramBlock blk;
    blk.full = (A.adjoint() * A) * invK;
    blk.lambda = CMatrix::Zero(b, b);
    for (std::size_t i = 0; i < errors.size(); ++i) {
      for (std::size_t j = 0; j < errors.size(); ++j) {
        Complex lam = 0.0;
        for (std::size_t q = 0; q < K; ++q) {
          lam += blk.full(static_cast<Eigen::Index>(i * K + q), static_cast<Eigen::Index>(j * K + q));
        }
        for (std::size_t q = 0; q < K; ++q) {
          blk.lambda(static_cast<Eigen::Index>(i * K + q), static_cast<Eigen::Index>(j * K + q)) =
              lam * invK;
        }
      }
    }
    blk.errors = std::move(errors);
    pair.blocks.push_back(std::move(blk));
  }
  return pair;
}

struct GramInvariantReport {
  double min_eigen_full = 0.0;
  double min_eigen_lambda = 0.0;
  double trace_full = 0.0;
  double trace_lambda = 0.0;
  double partial_trace_defect = 0.0;  // max |tr_C(full - lambda)|
  double hermiticity_defect = 0.0;
  bool ok(double tol = 1e-8) const {
    return min_eigen_full >= -tol && min_eigen_lambda >= -tol && hermiticity_defect <= tol &&
           partial_trace_defect <= tol;
  }
};

inline GramInvariantReport check_gram_invariants(const GramPair& pair) {
  GramInvariantReport r;
  r.min_eigen_full = r.min_eigen_lambda = std::numeric_limits<double>::infinity();
  const std::size_t K = pair.K;
  for (const auto& b : pair.blocks) {
    for (double v : block_spectrum(b.full)) r.min_eigen_full = std::min(r.min_eigen_full, v);
    for (double v : block_spectrum(b.lambda)) r.min_eigen_lambda = std::min(r.min_eigen_lambda, v);
    r.trace_full += b.full.trace().real();
    r.trace_lambda += b.lambda.trace().real();
    r.hermiticity_defect = std::max({r.hermiticity_defect,
                                     (b.full - b.full.adjoint()).cwiseAbs().maxCoeff(),
                                     (b.lambda - b.lambda.adjoint()).cwiseAbs().maxCoeff()});
    const std::size_t m = b.errors.size();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        Complex t = 0.0;
        for (std::size_t q = 0; q < K; ++q) {
          const auto a = static_cast<Eigen::Index>(i * K + q);
          const auto c = static_cast<Eigen::Index>(j * K + q);
          t += b.full(a, c) - b.lambda(a, c);
        }
        r.partial_trace_defect = std::max(r.partial_trace_defect, std::abs(t));
      }
    }
  }
  return r;
}

// S(Lambda + B || Lambda), summed over blocks.
inline RelativeEntropy aqec_relative_entropy(const GramPair& pair) {
  RelativeEntropy total;
  for (const auto& b : pair.blocks) total += relative_entropy(b.full, b.lambda);
  if (total.outside_support > kSupportTolerance) {
    total.finite = false;
    total.value = std::numeric_limits<double>::infinity();
  }
  return total;
}

// (1/(R-1)) ln[ tr((Lambda+B)^R) / tr(Lambda^R) ].
inline double renyi_ratio(const GramPair& pair, int R) {
  if (R < 2) throw DegenerateInputError("Renyi ratio needs R >= 2");
  std::vector<double> full_spec;
  std::vector<double> lambda_spec;
  for (const auto& b : pair.blocks) {
    auto f = block_spectrum(b.full);
    auto l = block_spectrum(b.lambda);
    full_spec.insert(full_spec.end(), f.begin(), f.end());
    lambda_spec.insert(lambda_spec.end(), l.begin(), l.end());
  }
  const double num = trace_power(full_spec, R);
  const double den = trace_power(lambda_spec, R);
  if (den <= 0.0) throw DegenerateInputError("tr(Lambda^R) vanishes");
  return std::log(num / den) / (R - 1);
}

// Direct check of P E_u^dag E_v P = lambda_uv P on every enumerated pair.
inline bool exact_kl_holds(const CodeBasis& basis, const KrausSet& kraus, double tol = 1e-10) {
  const auto images = kraus_images(basis, kraus);
  const auto K = static_cast<Eigen::Index>(basis.K());
  for (std::size_t u = 0; u < images.size(); ++u) {
    for (std::size_t v = u; v < images.size(); ++v) {
      const CMatrix m = images[u].adjoint() * images[v];
      const Complex lam = m.trace() / static_cast<double>(K);
      if ((m - lam * CMatrix::Identity(K, K)).cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

// Transpose recovery R_u = P E_u^dag N(P)^{-1/2}; equivalently
// (P/K)^{1/2} E_u^dag N(P/K)^{-1/2}. Stored through the K x d^n pieces
// M_u = (E_u V)^dag N(P)^{-1/2}, so that R_u = V M_u.
struct PetzRecovery {
  CMatrix n_inv_sqrt;
  std::vector<CMatrix> logical_pieces;
  std::size_t support_rank = 0;
  double completeness_defect = 0.0;  // max |sum R_u^dag R_u - projector(supp N(P))|

  std::vector<CMatrix> dense_kraus(const CodeBasis& basis) const {
    std::vector<CMatrix> out;
    for (const auto& m : logical_pieces) out.push_back(basis.words * m);
    return out;
  }
};

inline CMatrix channel_on_code(const std::vector<CMatrix>& images) {
  CMatrix np = CMatrix::Zero(images.front().rows(), images.front().rows());
  for (const auto& y : images) np.noalias() += y * y.adjoint();
  return np;
}

inline PetzRecovery petz_recovery(const CodeBasis& basis, const KrausSet& kraus) {
  if (kraus.terms.empty()) throw DegenerateInputError("empty Kraus set");
  const auto images = kraus_images(basis, kraus);
  const CMatrix np = channel_on_code(images);
  const auto inv = inverse_sqrt_on_support(np);
  PetzRecovery rec;
  rec.n_inv_sqrt = inv.matrix;
  rec.support_rank = inv.support_rank;
  CMatrix completeness = CMatrix::Zero(np.rows(), np.cols());
  for (const auto& y : images) {
    rec.logical_pieces.push_back(y.adjoint() * inv.matrix);
    completeness.noalias() += rec.logical_pieces.back().adjoint() * rec.logical_pieces.back();
  }
  const CMatrix support_proj = inv.matrix * np * inv.matrix;
  // support_proj is itself the support projector up to rounding; compare with
  // its idempotent part so a wrong inverse square root shows up.
  rec.completeness_defect = std::max((completeness - support_proj).cwiseAbs().maxCoeff(),
                                     (support_proj * support_proj - support_proj).cwiseAbs().maxCoeff());
  return rec;
}

// F_e = sum_a |tr(A_a) / K|^2 for logical-level Kraus operators A_a on C^K.
inline double entanglement_fidelity(const std::vector<CMatrix>& logical_kraus) {
  if (logical_kraus.empty()) return 0.0;
  const double K = static_cast<double>(logical_kraus.front().rows());
  double f = 0.0;
  for (const auto& a : logical_kraus) f += std::norm(a.trace() / K);
  return f;
}

// F_e of R o N o E for dense recovery Kraus operators on the physical space.
inline double entanglement_fidelity(const CodeBasis& basis, const KrausSet& noise,
                                    const std::vector<CMatrix>& recovery) {
  const auto images = kraus_images(basis, noise);
  std::vector<CMatrix> logical;
  for (const auto& r : recovery) {
    const CMatrix left = basis.words.adjoint() * r;
    for (const auto& y : images) logical.push_back(left * y);
  }
  return entanglement_fidelity(logical);
}

// F_e of Petz o N o E, using tr(V^dag R_u E_w V) = sum_q <E_u q| N^{-1/2} |E_w q>.
inline double entanglement_fidelity(const CodeBasis& basis, const KrausSet& noise,
                                    const PetzRecovery& rec) {
  const auto images = kraus_images(basis, noise);
  const auto U = static_cast<Eigen::Index>(images.size());
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  const std::size_t K = basis.K();
  CMatrix traces = CMatrix::Zero(U, U);
  CMatrix a(dim, U);
  for (std::size_t q = 0; q < K; ++q) {
    for (Eigen::Index u = 0; u < U; ++u) {
      a.col(u) = images[static_cast<std::size_t>(u)].col(static_cast<Eigen::Index>(q));
    }
    traces.noalias() += a.adjoint() * (rec.n_inv_sqrt * a);
  }
  return traces.cwiseAbs2().sum() / static_cast<double>(K * K);
}

struct CoherentInformation {
  double value = 0.0;           // S(output) - S(reference + output)
  double output_entropy = 0.0;  // S(N(P/K))
  double joint_entropy = 0.0;   // equal to the environment entropy
};

// For input I_K/K through N o E. The joint state's entropy is computed from
// the environment matrix W_uv = tr(E_u P E_v^dag) / K.
inline CoherentInformation coherent_information(const CodeBasis& basis, const KrausSet& kraus) {
  const auto images = kraus_images(basis, kraus);
  const double invK = 1.0 / static_cast<double>(basis.K());
  CoherentInformation ci;
  ci.output_entropy = von_neumann_entropy(channel_on_code(images) * invK);
  const auto U = static_cast<Eigen::Index>(images.size());
  CMatrix env(U, U);
  for (Eigen::Index u = 0; u < U; ++u) {
    for (Eigen::Index v = 0; v < U; ++v) {
      env(u, v) = (images[static_cast<std::size_t>(v)].adjoint() *
                   images[static_cast<std::size_t>(u)]).trace() * invK;
    }
  }
  ci.joint_entropy = von_neumann_entropy(env);
  ci.value = ci.output_entropy - ci.joint_entropy;
  return ci;
}

}  // namespace aqec
