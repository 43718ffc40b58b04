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

// Hermitian matrix helpers on top of Eigen: block splitting along the
// sparsity pattern, spectra, entropies and relative entropies (natural log).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "aqec/error.hpp"

namespace aqec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Eigenvalues below kZeroEigenvalueRatio * (largest eigenvalue) are exact zeros.
inline constexpr double kZeroEigenvalueRatio = 1e-12;
// Weight of the first argument outside the support of the second that still
// counts as "inside".
inline constexpr double kSupportTolerance = 1e-10;

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  // Components as sorted index lists, ordered by smallest member.
  std::vector<std::vector<std::size_t>> groups() {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(parent_.size(), parent_.size());
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      const std::size_t r = find(i);
      if (slot[r] == parent_.size()) {
        slot[r] = out.size();
        out.emplace_back();
      }
      out[slot[r]].push_back(i);
    }
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
};

inline CMatrix submatrix(const CMatrix& m, const std::vector<std::size_t>& idx) {
  const auto b = static_cast<Eigen::Index>(idx.size());
  CMatrix out(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

}  // namespace detail

// Connected components of the joint nonzero pattern of a and b. Entries below
// 1e-15 of the largest magnitude are treated as structural zeros.
inline std::vector<std::vector<std::size_t>> hermitian_blocks(const CMatrix& a,
                                                              const CMatrix& b) {
  const auto n = a.rows();
  double scale = 0.0;
  if (n > 0) scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  const double cut = 1e-15 * scale;
  detail::UnionFind uf(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j)) > cut || std::abs(b(i, j)) > cut) {
        uf.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  return uf.groups();
}

struct HermitianSpectrum {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;
};

namespace detail {

// H = A + iB acts on R^{2N} as [[A, -B], [B, A]]; every eigenvalue of H
// appears twice. Eigen's complex QR occasionally fails to converge on tiny,
// highly degenerate Gram blocks where the real solver does not.
inline Eigen::MatrixXd real_embedding(const CMatrix& m) {
  const auto N = m.rows();
  Eigen::MatrixXd r(2 * N, 2 * N);
  r << m.real(), -m.imag(), m.imag(), m.real();
  return r;
}

inline HermitianSpectrum hermitian_eigen_embedded(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(real_embedding(m));
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  const auto N = m.rows();
  HermitianSpectrum out{Eigen::VectorXd(N), CMatrix(N, N)};
  Eigen::Index found = 0;
  for (Eigen::Index c = 0; c < 2 * N && found < N; ++c) {
    const auto& v = solver.eigenvectors().col(c);
    CVector z = v.head(N).cast<Complex>() + Complex(0, 1) * v.tail(N).cast<Complex>();
    // The partner eigenvector maps to i z; drop anything already spanned.
    for (Eigen::Index j = 0; j < found; ++j) z -= out.vectors.col(j).dot(z) * out.vectors.col(j);
    const double nz = z.norm();
    if (nz < 1e-4) continue;
    out.vectors.col(found) = z / nz;
    out.values(found) = solver.eigenvalues()(c);
    ++found;
  }
  if (found != N) throw Error("Hermitian eigensolver failed");
  return out;
}

}  // namespace detail

inline HermitianSpectrum hermitian_eigen(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) return detail::hermitian_eigen_embedded(m);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() == Eigen::Success) return solver.eigenvalues();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> real(detail::real_embedding(m),
                                                      Eigen::EigenvaluesOnly);
  if (real.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out(i) = real.eigenvalues()(2 * i);
  return out;
}

// Spectrum of a Hermitian matrix assembled block by block.
inline std::vector<double> block_spectrum(const CMatrix& m) {
  std::vector<double> out;
  for (const auto& blk : hermitian_blocks(m, m)) {
    const auto ev = hermitian_eigenvalues(detail::submatrix(m, blk));
    out.insert(out.end(), ev.data(), ev.data() + ev.size());
  }
  return out;
}

inline double zero_cutoff(const std::vector<double>& spectrum) {
  double mx = 0.0;
  for (double v : spectrum) mx = std::max(mx, v);
  return kZeroEigenvalueRatio * mx;
}

// -sum lambda ln lambda over the spectrum, ignoring eigenvalues at the cutoff.
inline double entropy_of_spectrum(const std::vector<double>& spectrum) {
  const double cut = zero_cutoff(spectrum);
  double s = 0.0;
  for (double v : spectrum) {
    if (v > cut) s -= v * std::log(v);
  }
  return s;
}

inline double von_neumann_entropy(const CMatrix& rho) {
  return entropy_of_spectrum(block_spectrum(rho));
}

inline double trace_power(const std::vector<double>& spectrum, int R) {
  const double cut = zero_cutoff(spectrum);
  double t = 0.0;
  for (double v : spectrum) {
    if (v > cut) t += std::pow(v, R);
  }
  return t;
}

struct RelativeEntropy {
  double value = 0.0;  // +inf when the support condition fails
  bool finite = true;
  double outside_support = 0.0;  // tr(a * projector onto ker b)

  RelativeEntropy& operator+=(const RelativeEntropy& o) {
    value += o.value;
    finite = finite && o.finite;
    outside_support += o.outside_support;
    if (!finite) value = std::numeric_limits<double>::infinity();
    return *this;
  }
};

namespace detail {

// One block, with the zero cutoff supplied by the caller so that it refers to
// the spectrum of the whole matrix.
inline RelativeEntropy relative_entropy_block(const CMatrix& a, const CMatrix& b,
                                              double a_cut, double b_cut) {
  RelativeEntropy out;
  const auto ea = hermitian_eigenvalues(a);
  for (Eigen::Index i = 0; i < ea.size(); ++i) {
    if (ea(i) > a_cut) out.value += ea(i) * std::log(ea(i));
  }
  const auto sb = hermitian_eigen(b);
  // diagonal of V_b^dagger a V_b
  const CMatrix rotated = sb.vectors.adjoint() * a * sb.vectors;
  for (Eigen::Index j = 0; j < sb.values.size(); ++j) {
    const double w = rotated(j, j).real();
    if (sb.values(j) > b_cut) {
      out.value -= w * std::log(sb.values(j));
    } else {
      out.outside_support += w;
    }
  }
  return out;
}

}  // namespace detail

// S(a || b) = tr a (ln a - ln b) for Hermitian PSD a, b. Reports +inf, never a
// clipped value, when a has weight above kSupportTolerance on ker b.
inline RelativeEntropy relative_entropy(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("relative entropy needs square matrices of equal size");
  }
  const auto blocks = hermitian_blocks(a, b);
  std::vector<CMatrix> ab;
  std::vector<CMatrix> bb;
  double a_max = 0.0;
  double b_max = 0.0;
  for (const auto& blk : blocks) {
    ab.push_back(detail::submatrix(a, blk));
    bb.push_back(detail::submatrix(b, blk));
    a_max = std::max(a_max, hermitian_eigenvalues(ab.back()).maxCoeff());
    b_max = std::max(b_max, hermitian_eigenvalues(bb.back()).maxCoeff());
  }
  RelativeEntropy total;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    total += detail::relative_entropy_block(ab[i], bb[i], kZeroEigenvalueRatio * a_max,
                                            kZeroEigenvalueRatio * b_max);
  }
  if (total.outside_support > kSupportTolerance) {
    total.finite = false;
    total.value = std::numeric_limits<double>::infinity();
  }
  return total;
}

// Pseudo-inverse square root on the support of a PSD matrix.
struct InverseSqrt {
  CMatrix matrix;
  std::size_t support_rank = 0;
};

inline InverseSqrt inverse_sqrt_on_support(const CMatrix& m) {
  const auto s = hermitian_eigen(m);
  const double cut = kZeroEigenvalueRatio * std::max(0.0, s.values.maxCoeff());
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.values.size());
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (s.values(i) > cut) {
      inv(i) = 1.0 / std::sqrt(s.values(i));
      ++rank;
    }
  }
  return {s.vectors * inv.asDiagonal() * s.vectors.adjoint(), rank};
}

}  // namespace aqec
