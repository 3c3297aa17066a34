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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "premise_forge/records.hpp"

namespace premise_forge::dataset {

/// A record-level problem found while loading. `field` is empty for JSON
/// syntax errors.
struct Issue {
  std::size_t line = 0;
  std::string field;
  std::string message;
};

struct LoadResult {
  std::vector<QuestionSample> samples;  // only the records that validated
  std::vector<Issue> issues;
};

/// Parses and validates one JSONL line. Throws ParseError or InvariantViolation.
QuestionSample parse_sample(std::string_view line, std::size_t lineno);

/// Checks every QuestionSample invariant, including that sample_id is the
/// content hash. Throws InvariantViolation.
void validate(const QuestionSample& sample, std::size_t lineno = 0);

/// Validates every line and collects all problems; also flags duplicate ids.
LoadResult load_with_issues(const std::filesystem::path& path);
LoadResult parse_with_issues(std::string_view contents);

/// Throws the first ParseError / InvariantViolation found.
std::vector<QuestionSample> load(const std::filesystem::path& path);

std::string serialize(std::span<const QuestionSample> samples);
void save(const std::filesystem::path& path, std::span<const QuestionSample> samples);

/// predictions.jsonl: sample_id, gold_label, predicted, raw_response, subtype.
PredictionRecord parse_prediction(std::string_view line, std::size_t lineno);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> records);

enum class SplitName { Eval, Sft, Rl };
std::string_view to_string(SplitName name) noexcept;

struct DatasetSplit {
  SplitName name = SplitName::Eval;
  std::vector<QuestionSample> samples;
};

struct SplitFractions {
  double eval = 0.5;
  double sft = 0.25;
  double rl = 0.25;
};

/// Stratified by (subtype, label). Within each stratum the counts are set by
/// largest remainder, so each is within one of its exact share; the sft share
/// is drawn only from samples carrying a reference answer. Samples keep their
/// input order inside every split. Throws PreconditionError for bad
/// fractions or duplicate ids and InsufficientAnswered when a stratum cannot
/// fill its sft share.
std::array<DatasetSplit, 3> split(std::span<const QuestionSample> samples,
                                  const SplitFractions& fractions, std::uint64_t seed);

}  // namespace premise_forge::dataset
