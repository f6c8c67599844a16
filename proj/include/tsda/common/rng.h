// Copyright 2026  The tsda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TSDA_COMMON_RNG_H_
#define TSDA_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace tsda {

/// Mixes a global seed with a stage tag and an item index into an
/// independent 64-bit stream seed. Every random draw in the project
/// descends from one of these.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag,
                         std::uint64_t index = 0);

/// Thin wrapper over mt19937_64. Distributions are computed from raw engine
/// bits here so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  /// Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Uniform integer in [lo, hi], both inclusive.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tsda

#endif  // TSDA_COMMON_RNG_H_
