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

#ifndef WARDROBE_SEEDS_H_
#define WARDROBE_SEEDS_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace wardrobe {

// Stable 64-bit hashing used to derive independent RNG streams. The values
// are part of the reproducibility contract: changing them changes outputs.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t SplitMix64(std::uint64_t x);

// Seed for (`seed`, `module`, `purpose`).
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view module,
                         std::string_view purpose);

// Seed for a sequence of integers, e.g. the sorted member indices of an
// outfit.
std::uint64_t DeriveSeed(std::uint64_t seed,
                         std::span<const std::uint32_t> values);

}  // namespace wardrobe

#endif  // WARDROBE_SEEDS_H_
