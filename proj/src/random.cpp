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

#include "premise_forge/random.hpp"

namespace premise_forge {
namespace {

constexpr uint128 kMultiplier =
    (static_cast<uint128>(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

constexpr std::uint64_t rotr(std::uint64_t v, unsigned rot) noexcept {
  return (v >> rot) | (v << ((64U - rot) & 63U));
}

}  // namespace

Pcg64::Pcg64(std::uint64_t seed, std::uint64_t stream) noexcept {
  inc_ = (static_cast<uint128>(stream) << 1) | 1U;
  step();
  state_ += seed;
  step();
}

void Pcg64::step() noexcept { state_ = state_ * kMultiplier + inc_; }

Pcg64::result_type Pcg64::operator()() noexcept {
  step();
  const auto hi = static_cast<std::uint64_t>(state_ >> 64);
  const auto lo = static_cast<std::uint64_t>(state_);
  return rotr(hi ^ lo, static_cast<unsigned>(state_ >> 122));
}

std::uint64_t Pcg64::bounded(std::uint64_t bound) noexcept {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace premise_forge
