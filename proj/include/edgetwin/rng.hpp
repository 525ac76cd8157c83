// Copyright 2026 The edgetwin Authors
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

#ifndef EDGETWIN__RNG_HPP_
#define EDGETWIN__RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace edgetwin
{

/// Portable seeded random source. Only the raw mt19937_64 stream is used, so
/// results are identical across standard library implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection of the biased tail.
  std::size_t index(std::size_t n);

  /// Exponentially distributed waiting time with the given rate (> 0).
  double exponential(double rate);

  bool bernoulli(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
};

/// Named sub-seed: lets a component be re-run in isolation from the
/// top-level seed (splitmix64 over seed ^ fnv1a(name)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

}  // namespace edgetwin

#endif  // EDGETWIN__RNG_HPP_
