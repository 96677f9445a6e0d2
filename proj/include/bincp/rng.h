//
// Copyright 2026 The BinCP Authors
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
//

#ifndef BINCP_RNG_H_
#define BINCP_RNG_H_

#include <cstdint>
#include <limits>

namespace bincp {

// Identifies one independent random stream. Streams with different keys are
// statistically independent, so trials, points and classes can be drawn in
// any order (or in parallel) without changing the result.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t point = 0;
  std::uint64_t cls = 0;
  std::uint64_t tag = 0;
};

// Counter-based generator: the n-th output is a bijective mix of
// (key, n). Satisfies UniformRandomBitGenerator so it plugs into <random>.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(const StreamKey& key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace bincp

#endif  // BINCP_RNG_H_
