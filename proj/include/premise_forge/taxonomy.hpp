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

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace premise_forge {

enum class PremiseLevel { Perceptual, Cognitive, Reasoning };

// Declaration order is the canonical listing order: perceptual subtypes first,
// then cognitive, then reasoning.
enum class PremiseSubtype {
  EntityExistence,
  VisualAttributes,
  NumericalAttributes,
  StateAttributes,
  TextualContent,
  SymbolicMeaning,
  SpatialRelations,
  InteractionRelations,
  PartWholeRelations,
  EmotionalState,
  Scene,
  LogicalRelations,
  CommonsenseKnowledge,
};

inline constexpr std::size_t kNumLevels = 3;
inline constexpr std::size_t kNumSubtypes = 13;

struct SubtypeInfo {
  PremiseSubtype subtype;
  PremiseLevel level;
  std::string_view id;          // serialized snake_case form
  std::string_view prompt_key;  // extraction template key in the prompt store
  std::string_view description;
};

PremiseLevel level_of(PremiseSubtype subtype) noexcept;

/// All subtypes in canonical order.
std::span<const PremiseSubtype> all_subtypes() noexcept;
std::span<const PremiseLevel> all_levels() noexcept;

const SubtypeInfo& info(PremiseSubtype subtype) noexcept;

std::string_view to_string(PremiseSubtype subtype) noexcept;
std::string_view to_string(PremiseLevel level) noexcept;
/// Display name, e.g. "Perceptual".
std::string_view display_name(PremiseLevel level) noexcept;

std::optional<PremiseSubtype> parse_subtype(std::string_view id) noexcept;
std::optional<PremiseLevel> parse_level(std::string_view id) noexcept;

/// Position of the subtype in all_subtypes().
std::size_t index_of(PremiseSubtype subtype) noexcept;

}  // namespace premise_forge
