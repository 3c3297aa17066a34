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

#include <chrono>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "premise_forge/model_client.hpp"
#include "premise_forge/records.hpp"

namespace premise_forge {

/// Phrases that mark a free-form response as rejecting the premise.
const std::vector<std::string>& default_deny_list();

/// Reads a verdict from a model response. Rules, first match wins:
///  1. an <answer> block whose first token is FALSE_PREMISE or VALID;
///  2. any deny-list phrase anywhere in the text (case-insensitive);
///  3. a substantive reply of at least three words, taken as accepting the premise;
///  4. otherwise Unparseable.
/// With `fallback` off only rule 1 applies.
Verdict classify_response(std::string_view raw_text, std::span<const std::string> deny_list,
                          bool fallback = true);

struct EvaluationConfig {
  std::string model_name;
  std::string template_key = "evaluate";
  std::vector<std::string> deny_list = default_deny_list();
  bool fallback_parsing = true;
  unsigned concurrency = 8;
  std::chrono::seconds call_timeout{120};
  double temperature = 0.0;
  int max_tokens = 1024;

  /// Throws ConfigError when fallback parsing is on with an empty deny-list.
  void validate() const;
};

/// Maps image_id to a local path or URL; nullopt when the image is unknown.
using ImageResolver = std::function<std::optional<std::string>(const std::string& image_id)>;

/// One PredictionRecord per sample, in dataset order. A failed call yields an
/// Unparseable record whose raw_response holds the error text. The mock
/// fixture key for a sample is "eval:<sample_id>".
std::vector<PredictionRecord> evaluate_model(std::span<const QuestionSample> split,
                                             const EvaluationConfig& config,
                                             const ChatBackend& client,
                                             const TemplateStore& templates,
                                             const ImageResolver& images = {});

}  // namespace premise_forge
