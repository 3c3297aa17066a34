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

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>

#include "premise_forge/taxonomy.hpp"

namespace premise_forge {

enum class PremiseLabel { FalsePremise, TruePremise };

/// A model's verdict on one question; Unparseable when no verdict could be read.
enum class Verdict { FalsePremise, TruePremise, Unparseable };

std::string_view to_string(PremiseLabel label) noexcept;
std::string_view to_string(Verdict verdict) noexcept;
std::optional<PremiseLabel> parse_label(std::string_view s) noexcept;
std::optional<Verdict> parse_verdict(std::string_view s) noexcept;
Verdict as_verdict(PremiseLabel label) noexcept;

/// One generated question. Positive samples embed the original premise,
/// negative samples embed a corrupted one.
struct QuestionSample {
  std::string sample_id;
  std::string image_id;
  PremiseLevel level = PremiseLevel::Perceptual;
  PremiseSubtype subtype = PremiseSubtype::EntityExistence;
  std::string original_premise;
  std::string embedded_premise;
  std::string question;
  PremiseLabel label = PremiseLabel::TruePremise;
  std::optional<std::string> reference_answer;
  nlohmann::json generator_metadata = nlohmann::json::object();

  bool operator==(const QuestionSample&) const = default;
};

/// First 16 hex characters of SHA-256 over image_id, subtype, label and
/// question joined by the ASCII unit separator (0x1f).
std::string compute_sample_id(std::string_view image_id, PremiseSubtype subtype,
                              PremiseLabel label, std::string_view question);

struct PredictionRecord {
  std::string sample_id;
  PremiseLabel gold_label = PremiseLabel::TruePremise;
  Verdict predicted = Verdict::Unparseable;
  std::string raw_response;
  PremiseSubtype subtype = PremiseSubtype::EntityExistence;

  bool operator==(const PredictionRecord&) const = default;
};

/// Canonical field order: sample_id, image_id, level, subtype,
/// original_premise, embedded_premise, question, label, reference_answer,
/// generator_metadata.
nlohmann::ordered_json to_json(const QuestionSample& sample);
/// Canonical field order: sample_id, gold_label, predicted, raw_response, subtype.
nlohmann::ordered_json to_json(const PredictionRecord& record);

/// One JSON document per line, UTF-8, LF terminated.
std::string to_jsonl_line(const QuestionSample& sample);
std::string to_jsonl_line(const PredictionRecord& record);

}  // namespace premise_forge
