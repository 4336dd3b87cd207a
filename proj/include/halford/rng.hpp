// Copyright 2026 The Halford Authors
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

#ifndef HALFORD_RNG_HPP
#define HALFORD_RNG_HPP

#include <array>
#include <cstdint>

namespace halford {

/// Weyl increment used by the splitmix mixing scheme.
inline constexpr std::uint64_t kSeedGamma = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer: a strong 64-bit integer hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

/// Derives the seed of child stream `index` from `root`.
///
/// The scheme is fixed bit-exactly: mix64(root + kSeedGamma * (index + 1)).
/// Replications, check sides, and study cells each derive their streams this
/// way, so results are independent of thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(root + kSeedGamma * (index + 1));
}

/// xoshiro256++ stream seeded via splitmix64 expansion of a 64-bit seed.
///
/// Streams are value types: cheap to copy, never shared between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += kSeedGamma;
      word = mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double strictly inside (0, 1): bin centers of a 2^53 grid.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace halford

#endif  // HALFORD_RNG_HPP
