// Copyright 2026 The skillret Authors
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

#ifndef SKILLRET_NUMCORE_RNG_H_
#define SKILLRET_NUMCORE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "skillret/numcore/tensor.h"

namespace skillret {

// 64-bit Mersenne Twister with portable uniform/normal transforms, so a
// seed yields the same stream with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Seed for a named sub-stream of a master seed. Streams are independent of
  // the order in which they are requested.
  static std::uint64_t DeriveSeed(std::uint64_t master, std::string_view stream);
  static Rng ForStream(std::uint64_t master, std::string_view stream) {
    return Rng(DeriveSeed(master, stream));
  }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer on the closed range [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  double Normal();
  Vector NormalVector(int n);
  Matrix NormalMatrix(int rows, int cols);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_RNG_H_
