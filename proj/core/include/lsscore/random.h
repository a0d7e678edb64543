// Copyright 2026 The lsscore Authors.
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

#ifndef LSSCORE_RANDOM_H_
#define LSSCORE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lsscore {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent child seeds so that every
// item gets a stream that does not depend on scheduling order.
inline uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> path) {
  uint64_t s = MixSeed(master);
  for (uint64_t p : path) s = MixSeed(s ^ MixSeed(p + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace lsscore

#endif  // LSSCORE_RANDOM_H_
