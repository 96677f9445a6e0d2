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

#include "bincp/rng.h"

namespace bincp {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(const StreamKey& key) {
  std::uint64_t h = mix64(key.seed + kGolden);
  h = mix64(h ^ (key.trial + 0x632BE59BD9B4E019ULL));
  h = mix64(h ^ (key.point + 0x8CB92BA72F3D8DD7ULL));
  h = mix64(h ^ (key.cls + 0xD6E8FEB86659FD93ULL));
  h = mix64(h ^ (key.tag + 0xA0761D6478BD642FULL));
  key_ = h;
}

CounterRng::result_type CounterRng::operator()() {
  return mix64(key_ + (++counter_) * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace bincp
