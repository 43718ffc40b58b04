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

// Finite-size inequalities tying the relative entropy to entanglement
// fidelity and to the MLD success probability.

#pragma once

#include <cmath>
#include <sstream>
#include <string>

namespace aqec {

// h(x) = -x ln x - (1-x) ln(1-x) + x ln(K^2 - 1), with 0 ln 0 = 0.
inline double h_bound(double x, double K) {
  auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  const double extra = K > 1.0 ? x * std::log(K * K - 1.0) : 0.0;
  return -xlogx(x) - xlogx(1.0 - x) + extra;
}

inline constexpr double kBoundSlackTolerance = 1e-9;

struct FidelityBoundReport {
  double entropy = 0.0;
  double fidelity = 0.0;
  double K = 1.0;
  double entropy_lower_slack = 0.0;  // S - 0
  double entropy_upper_slack = 0.0;  // 2 ln K - S
  double fidelity_upper_slack = 0.0;  // 1 - F_e
  double petz_lower_slack = 0.0;      // F_e - (1 - sqrt(2S))
  double converse_slack = 0.0;        // 2 h(1 - F_e) - S
  bool ok = true;
  std::string instance;

  std::string describe() const {
    std::ostringstream out;
    out << (ok ? "ok" : "VIOLATED") << " [" << instance << "] S=" << entropy
        << " F_e=" << fidelity << " K=" << K << " slacks{S>=0:" << entropy_lower_slack
        << ", S<=2lnK:" << entropy_upper_slack << ", F<=1:" << fidelity_upper_slack
        << ", F>=1-sqrt(2S):" << petz_lower_slack << ", S<=2h(1-F):" << converse_slack
        << "}";
    return out.str();
  }
};

// Checks 0 <= S <= 2 ln K, 1 >= F_e >= 1 - sqrt(2S) and S <= 2 h(1 - F_e).
// The middle inequality is only guaranteed for the transpose recovery; the
// last holds for any recovery.
inline FidelityBoundReport check_bounds_thm1(double entropy, double fidelity, double K,
                                             std::string instance = {},
                                             double tol = kBoundSlackTolerance) {
  FidelityBoundReport r;
  r.entropy = entropy;
  r.fidelity = fidelity;
  r.K = K;
  r.instance = std::move(instance);
  r.entropy_lower_slack = entropy;
  r.entropy_upper_slack = 2.0 * std::log(K) - entropy;
  r.fidelity_upper_slack = 1.0 - fidelity;
  r.petz_lower_slack = fidelity - (1.0 - std::sqrt(2.0 * std::max(0.0, entropy)));
  r.converse_slack = 2.0 * h_bound(1.0 - fidelity, K) - entropy;
  r.ok = r.entropy_lower_slack >= -tol && r.entropy_upper_slack >= -tol &&
         r.fidelity_upper_slack >= -tol && r.petz_lower_slack >= -tol &&
         r.converse_slack >= -tol;
  return r;
}

struct SuccessBoundReport {
  double entropy = 0.0;
  double success = 0.0;
  double K = 1.0;
  double lower_slack = 0.0;  // H + ln Pr(success)
  double upper_slack = 0.0;  // h(1 - Pr(success)) - H
  bool ok = true;
  std::string instance;

  std::string describe() const {
    std::ostringstream out;
    out << (ok ? "ok" : "VIOLATED") << " [" << instance << "] H=" << entropy
        << " Pr(success)=" << success << " slacks{-lnP<=H:" << lower_slack
        << ", H<=h(1-P):" << upper_slack << "}";
    return out.str();
  }
};

// -ln Pr(success) <= H(L|S) <= h(1 - Pr(success)).
inline SuccessBoundReport check_bounds_thm2(double entropy, double success, double K,
                                            std::string instance = {},
                                            double tol = kBoundSlackTolerance) {
  SuccessBoundReport r;
  r.entropy = entropy;
  r.success = success;
  r.K = K;
  r.instance = std::move(instance);
  r.lower_slack = entropy + std::log(success);
  r.upper_slack = h_bound(1.0 - success, K) - entropy;
  r.ok = r.lower_slack >= -tol && r.upper_slack >= -tol;
  return r;
}

}  // namespace aqec
