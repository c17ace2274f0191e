// Copyright 2026 The Wardrobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wardrobe/seeds.h"

namespace wardrobe {

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view module,
                         std::string_view purpose) {
  std::uint64_t h = SplitMix64(seed);
  h = Fnv1a64(module, h);
  h = Fnv1a64("/", h);
  h = Fnv1a64(purpose, h);
  return SplitMix64(h);
}

std::uint64_t DeriveSeed(std::uint64_t seed,
                         std::span<const std::uint32_t> values) {
  std::uint64_t h = SplitMix64(seed);
  for (std::uint32_t v : values) h = SplitMix64(h ^ v);
  return h;
}

}  // namespace wardrobe
