// Copyright 2026 Semforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace semforge {

// 64-bit linear congruential generator with Knuth's MMIX constants:
//
//   state' = state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
//
// Outputs are the xor-shifted state so the weak low bits of the LCG do not
// leak into bounded draws. All shuffles and samples in the toolkit go
// through this generator; the constants are part of the file-format-level
// reproducibility contract (same seed, same splits, on any platform).
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed ^ kSeedMix) { next(); }

  std::uint64_t next() {
    state_ = state_ * kMul + kInc;
    std::uint64_t x = state_;
    x ^= x >> 33;
    return x;
  }

  // Draw from [0, n) via Lemire's multiply-shift reduction. n must be > 0.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kMul = 6364136223846793005ULL;
  static constexpr std::uint64_t kInc = 1442695040888963407ULL;
  static constexpr std::uint64_t kSeedMix = 0x9e3779b97f4a7c15ULL;

  std::uint64_t state_;
};

// FNV-1a, used to derive per-key subseeds (e.g. one shuffle stream per
// domain) and to hash output trees in tests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Fisher-Yates with draws from Lcg64; unlike std::shuffle the permutation
// is identical on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& values, Lcg64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace semforge
