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

#include "premise_forge/taxonomy.hpp"

namespace premise_forge {
namespace {

using L = PremiseLevel;
using S = PremiseSubtype;

constexpr std::array<SubtypeInfo, kNumSubtypes> kSubtypes{{
    {S::EntityExistence, L::Perceptual, "entity_existence", "extract_entity_existence",
     "Whether a particular object, person, or animal is present in the image."},
    {S::VisualAttributes, L::Perceptual, "visual_attributes", "extract_visual_attributes",
     "Color, shape, material, or texture of a visible entity."},
    {S::NumericalAttributes, L::Perceptual, "numerical_attributes", "extract_numerical_attributes",
     "How many instances of an entity are visible."},
    {S::StateAttributes, L::Perceptual, "state_attributes", "extract_state_attributes",
     "The condition of an entity: open or closed, wet or dry, lit or unlit."},
    {S::TextualContent, L::Perceptual, "textual_content", "extract_textual_content",
     "Words, numbers, or characters written in the image."},
    {S::SymbolicMeaning, L::Perceptual, "symbolic_meaning", "extract_symbolic_meaning",
     "The conventional meaning of a sign, icon, logo, or gesture."},
    {S::SpatialRelations, L::Cognitive, "spatial_relations", "extract_spatial_relations",
     "Relative position of two entities (left of, on top of, behind)."},
    {S::InteractionRelations, L::Cognitive, "interaction_relations", "extract_interaction_relations",
     "An action one entity performs on or with another."},
    {S::PartWholeRelations, L::Cognitive, "part_whole_relations", "extract_part_whole_relations",
     "An entity being a component of a larger entity."},
    {S::EmotionalState, L::Cognitive, "emotional_state", "extract_emotional_state",
     "The apparent emotion or mood of a person or animal."},
    {S::Scene, L::Cognitive, "scene", "extract_scene",
     "The kind of place or setting depicted, and its time of day or season."},
    {S::LogicalRelations, L::Reasoning, "logical_relations", "extract_logical_relations",
     "Cause and effect, purpose, or temporal order implied by the image."},
    {S::CommonsenseKnowledge, L::Reasoning, "commonsense_knowledge", "extract_commonsense_knowledge",
     "World knowledge needed to interpret what the image shows."},
}};

constexpr std::array<PremiseSubtype, kNumSubtypes> kOrder = [] {
  std::array<PremiseSubtype, kNumSubtypes> out{};
  for (std::size_t i = 0; i < kNumSubtypes; ++i) out[i] = kSubtypes[i].subtype;
  return out;
}();

constexpr std::array<PremiseLevel, kNumLevels> kLevels{L::Perceptual, L::Cognitive, L::Reasoning};

// The table is indexed by enum value; keep the two in lockstep.
constexpr bool table_matches_enum() {
  for (std::size_t i = 0; i < kNumSubtypes; ++i) {
    if (static_cast<std::size_t>(kSubtypes[i].subtype) != i) return false;
  }
  return true;
}
static_assert(table_matches_enum());

}  // namespace

PremiseLevel level_of(PremiseSubtype subtype) noexcept { return info(subtype).level; }

std::span<const PremiseSubtype> all_subtypes() noexcept { return kOrder; }
std::span<const PremiseLevel> all_levels() noexcept { return kLevels; }

const SubtypeInfo& info(PremiseSubtype subtype) noexcept {
  return kSubtypes[static_cast<std::size_t>(subtype)];
}

std::size_t index_of(PremiseSubtype subtype) noexcept { return static_cast<std::size_t>(subtype); }

std::string_view to_string(PremiseSubtype subtype) noexcept { return info(subtype).id; }

std::string_view to_string(PremiseLevel level) noexcept {
  switch (level) {
    case L::Perceptual: return "perceptual";
    case L::Cognitive: return "cognitive";
    case L::Reasoning: return "reasoning";
  }
  return "";
}

std::string_view display_name(PremiseLevel level) noexcept {
  switch (level) {
    case L::Perceptual: return "Perceptual";
    case L::Cognitive: return "Cognitive";
    case L::Reasoning: return "Reasoning";
  }
  return "";
}

std::optional<PremiseSubtype> parse_subtype(std::string_view id) noexcept {
  for (const auto& s : kSubtypes) {
    if (s.id == id) return s.subtype;
  }
  return std::nullopt;
}

std::optional<PremiseLevel> parse_level(std::string_view id) noexcept {
  for (auto level : kLevels) {
    if (to_string(level) == id) return level;
  }
  return std::nullopt;
}

}  // namespace premise_forge
