// Copyright 2026 The Authors.
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

#ifndef FEDBAN_RNG_HPP_
#define FEDBAN_RNG_HPP_

// Counter-based seed derivation. Every random draw in a run is keyed by
// (run seed, stream, index), so results never depend on call order.

#include <cstdint>
#include <random>

namespace fedban {

enum class Stream : std::uint64_t {
  kTheta = 1,
  kArms = 2,
  kNoise = 3,
  kArrival = 4,
  kIntrinsicCost = 5,
  kPopulation = 6,
  kOracle = 7,
};

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t seed, Stream stream,
                                   std::uint64_t index) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^
                               static_cast<std::uint64_t>(stream)) ^
                    index);
}

inline std::mt19937_64 MakeEngine(std::uint64_t seed, Stream stream,
                                  std::uint64_t index) {
  return std::mt19937_64(DeriveSeed(seed, stream, index));
}

}  // namespace fedban

#endif  // FEDBAN_RNG_HPP_
