//
// Copyright 2026 The Pattern DP Authors
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

#ifndef PATTERN_DP_RNG_H_
#define PATTERN_DP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace pattern_dp {

// Deterministic generator: the same seed yields the same sequence on every
// platform. std::mt19937_64 is fully specified by the standard; the
// distributions below are hand-rolled because the std:: ones are not.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : seed_(seed), engine_(seed) {}

  // Child seed from (seed, tags...), mixed with splitmix64. Used to give each
  // Monte-Carlo cell or trial its own independent stream.
  static uint64_t Derive(uint64_t seed, std::initializer_list<uint64_t> tags);

  SeededRng Split(std::initializer_list<uint64_t> tags) const {
    return SeededRng(Derive(seed_, tags));
  }

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  uint64_t Below(uint64_t n);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Fisher-Yates.
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[Below(i)]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pattern_dp

#endif  // PATTERN_DP_RNG_H_
