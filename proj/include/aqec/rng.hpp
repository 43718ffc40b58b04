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

// Counter-based seeding: every sample or chain draws from its own stream
// derived from (master seed, index), so results do not depend on how work is
// split across threads.

#pragma once

#include <cstdint>
#include <random>

namespace aqec {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng stream_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

inline double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

}  // namespace aqec
