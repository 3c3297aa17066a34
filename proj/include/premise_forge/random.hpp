// Copyright 2026 The premise-forge Authors
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

namespace premise_forge {

__extension__ using uint128 = unsigned __int128;

/// PCG64: 128-bit LCG state, XSL-RR output permutation, 64-bit outputs.
/// Seeding and stepping follow the reference pcg_setseq_128 routines, so a
/// (seed, stream) pair produces the same sequence as any conforming PCG64
/// (e.g. numpy's PCG64 once its state/inc are set to the values this class
/// derives). Distinct streams give statistically independent sequences.
class Pcg64 {
 public:
  using result_type = std::uint64_t;

  explicit Pcg64(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  result_type operator()() noexcept;

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  uint128 state() const noexcept { return state_; }
  uint128 increment() const noexcept { return inc_; }

 private:
  void step() noexcept;

  uint128 state_ = 0;
  uint128 inc_ = 0;
};

}  // namespace premise_forge
