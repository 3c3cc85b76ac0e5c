// Copyright 2026 The bestexp Authors
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

#ifndef BESTEXP_RNG_H_
#define BESTEXP_RNG_H_

#include <cstdint>

namespace bestexp {

// Counter-based generator: the i-th draw is a pure function of (seed, i),
// so draws can be split across workers without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0)
      : seed_(seed), counter_(start) {}

  static std::uint64_t At(std::uint64_t seed, std::uint64_t index) {
    // SplitMix64 finalizer over the Weyl sequence.
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t NextU64() { return At(seed_, counter_++); }

  // Uniform on (0, 1] with 53-bit resolution.
  double NextUnitOpenClosed() {
    return static_cast<double>((NextU64() >> 11) + 1) * 0x1.0p-53;
  }

  // Independent stream for a sub-task.
  CounterRng Split(std::uint64_t stream) const {
    return CounterRng(At(seed_ ^ 0xD1B54A32D192ED03ULL, stream));
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace bestexp

#endif  // BESTEXP_RNG_H_
