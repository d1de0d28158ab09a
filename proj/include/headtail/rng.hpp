// Copyright 2026 The headtail Authors
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace headtail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a key tuple into one 64-bit seed. Order-sensitive.
constexpr std::uint64_t mix_key(std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto k : key) h = splitmix64(h ^ splitmix64(k));
  return h;
}

// Stream tags keep unrelated draws (sampling, calibration, evaluation, ...)
// on disjoint key spaces.
enum class StreamTag : std::uint64_t {
  init = 1,
  sample = 2,
  guided = 3,
  correct = 4,
  calibrate = 5,
  session = 6,
  evaluate = 7,
  truncate = 8,
  corpus = 9,
};

// Counter-based generator: a splitmix64 sequence started from a hashed key.
// Every (seed, tag, a, b) tuple names an independent, replayable stream, so a
// draw never depends on how other queries' draws were interleaved.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit KeyedRng(std::uint64_t seed) noexcept : state_(seed) {}
  KeyedRng(std::uint64_t root, StreamTag tag, std::uint64_t a, std::uint64_t b = 0) noexcept
      : state_(mix_key({root, static_cast<std::uint64_t>(tag), a, b})) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace headtail
