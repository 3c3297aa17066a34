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
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>

#include "premise_forge/model_client.hpp"
#include "premise_forge/records.hpp"

namespace premise_forge::rewards {

/// A policy completion with its <think> and <answer> blocks. Each block is
/// present only when its tag pair occurs exactly once, opening before closing;
/// when both pairs exist the think block must close before the answer opens,
/// otherwise neither is exposed.
class Completion {
 public:
  explicit Completion(std::string text);

  const std::string& text() const noexcept { return text_; }
  const std::optional<std::string>& think_block() const noexcept { return think_; }
  const std::optional<std::string>& answer_block() const noexcept { return answer_; }

 private:
  std::string text_;
  std::optional<std::string> think_;
  std::optional<std::string> answer_;
};

struct RewardWeights {
  double format = 1.0;
  double answer = 1.0;
  double reasoning = 1.0;

  /// Throws PreconditionError unless all are finite, non-negative, and not all zero.
  void validate() const;
};

struct RewardBreakdown {
  double format = 0.0;
  double answer = 0.0;
  double reasoning = 0.0;
  double total = 0.0;
  RewardWeights weights;
  bool reasoning_skipped = false;  // format failed, the judge was not called
  std::optional<std::string> judge_warning;
};

/// 1 when the whole text is `<think>..</think><answer>..</answer>` with
/// optional surrounding whitespace and both blocks non-blank.
double format_reward(const Completion& completion);

/// 1 when the answer block's verdict equals the gold label.
double answer_reward(const Completion& completion, PremiseLabel gold);

struct JudgeResult {
  double reward = 0.0;
  std::optional<int> score;  // 0..5 as emitted by the judge
  std::optional<std::string> warning;
};

/// Reads the judge's score: the last integer on the last non-blank line,
/// accepted only in 0..5.
std::optional<int> parse_judge_score(std::string_view judge_text);

struct JudgeClient {
  const ChatBackend* backend = nullptr;
  std::string model_name;
  double temperature = 0.0;
  int max_tokens = 512;
  std::string template_key = "judge_reasoning";
};

/// score / 5 from an LLM judge; an unreadable reply scores 0 with a warning.
/// The mock fixture key is "judge:<fixture_id>".
JudgeResult reasoning_reward(const Completion& completion, std::string_view question,
                             PremiseLabel gold, const JudgeClient& judge,
                             const TemplateStore& templates, std::string_view fixture_id);

/// (w_f*f + w_a*a + w_r*r) / (w_f + w_a + w_r).
double combine(double format, double answer, double reasoning, const RewardWeights& weights);

/// All three components and their weighted total. The judge is only
/// consulted when the format reward is 1.
RewardBreakdown total_reward(const Completion& completion, PremiseLabel gold,
                             std::string_view question, const JudgeClient& judge,
                             const TemplateStore& templates, const RewardWeights& weights,
                             std::string_view fixture_id);

nlohmann::ordered_json to_json(const RewardBreakdown& breakdown);

}  // namespace premise_forge::rewards
