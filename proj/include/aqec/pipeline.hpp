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

// One-call analyses of a (code, channel) instance by both routes, shared by
// the command-line tool and the test suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "aqec/bounds.hpp"
#include "aqec/classent.hpp"
#include "aqec/codes.hpp"
#include "aqec/exactkl.hpp"
#include "aqec/noise.hpp"

namespace aqec {

struct DenseAnalysis {
  std::size_t kraus_terms = 0;
  std::size_t merged_terms = 0;
  double kraus_mass = 1.0;
  std::size_t gram_index = 0;
  std::size_t blocks = 0;
  RelativeEntropy relative_entropy;
  bool exact_kl = false;
  double petz_fidelity = 0.0;      // conditioned on the listed Kraus terms
  double petz_fidelity_raw = 0.0;  // includes the mass deficit
  double petz_completeness_defect = 0.0;
  CoherentInformation coherent;
  GramInvariantReport invariants;
};

inline DenseAnalysis analyze_dense(const StabilizerCode& code, const WeylChannel& ch,
                                   std::optional<std::size_t> weight_cap = std::nullopt) {
  DenseAnalysis a;
  const auto basis = build_codewords(code);
  const auto raw = kraus_enumerate(ch, weight_cap);
  a.kraus_terms = raw.size();
  a.kraus_mass = raw.captured_mass;
  const auto kraus = merge_equivalent_kraus(basis, raw);
  a.merged_terms = kraus.size();
  const auto gram = build_gram(basis, kraus);
  a.gram_index = gram.index_size();
  a.blocks = gram.blocks.size();
  a.invariants = check_gram_invariants(gram);
  a.relative_entropy = aqec_relative_entropy(gram);
  a.exact_kl = exact_kl_holds(basis, kraus);
  const auto rec = petz_recovery(basis, kraus);
  // A truncated set is a trace-decreasing channel; F_e is taken relative to
  // the captured mass so that exact-KL inputs recover perfectly.
  a.petz_fidelity_raw = entanglement_fidelity(basis, kraus, rec);
  a.petz_fidelity = std::min(1.0, a.petz_fidelity_raw / raw.captured_mass);
  a.petz_completeness_defect = rec.completeness_defect;
  a.coherent = coherent_information(basis, kraus);
  return a;
}

struct ClassAnalysis {
  double entropy = 0.0;
  double success = 0.0;
  double mass = 0.0;
  double min_entry = 0.0;
  std::size_t syndromes = 0;
};

inline ClassAnalysis analyze_classes(const StabilizerCode& code, const WeylChannel& ch,
                                     std::size_t threads = 1) {
  const auto table = build_class_table(ClassEngine(code, ch), threads);
  return {table.conditional_entropy(), table.mld_success(), table.total_mass(),
          table.min_entry(), table.entries.size()};
}

inline std::string instance_name(const StabilizerCode& code, const WeylChannel& ch, double p) {
  return code.name() + "/" + ch.name() + "/p=" + std::to_string(p);
}

}  // namespace aqec
