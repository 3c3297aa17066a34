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

#include "premise_forge/rewards.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <regex>

#include "premise_forge/errors.hpp"
#include "premise_forge/evaluator.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge::rewards {
namespace {

struct Span {
  std::size_t open;   // position of the opening tag
  std::size_t close;  // position of the closing tag
  std::size_t end;    // one past the closing tag
  std::string_view body;
};

std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string_view::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::optional<Span> unique_block(std::string_view s, std::string_view name) {
  const std::string open_tag = "<" + std::string(name) + ">";
  const std::string close_tag = "</" + std::string(name) + ">";
  if (count_occurrences(s, open_tag) != 1 || count_occurrences(s, close_tag) != 1) return std::nullopt;
  const auto open = s.find(open_tag);
  const auto close = s.find(close_tag);
  if (close < open + open_tag.size()) return std::nullopt;
  const auto body_start = open + open_tag.size();
  return Span{open, close, close + close_tag.size(), s.substr(body_start, close - body_start)};
}

}  // namespace

Completion::Completion(std::string text) : text_(std::move(text)) {
  const auto think = unique_block(text_, "think");
  const auto answer = unique_block(text_, "answer");
  if (think && answer && think->end > answer->open) return;
  if (think) think_ = std::string(think->body);
  if (answer) answer_ = std::string(answer->body);
}

void RewardWeights::validate() const {
  for (double w : {format, answer, reasoning}) {
    if (!std::isfinite(w) || w < 0.0) throw PreconditionError("reward weights must be finite and >= 0");
  }
  if (format + answer + reasoning <= 0.0) throw PreconditionError("reward weights must not all be zero");
}

double format_reward(const Completion& c) {
  if (!c.think_block() || !c.answer_block()) return 0.0;
  if (text::trim(*c.think_block()).empty() || text::trim(*c.answer_block()).empty()) return 0.0;
  const std::string_view s = c.text();
  const auto think = unique_block(s, "think");
  const auto answer = unique_block(s, "answer");
  if (!text::trim(s.substr(0, think->open)).empty()) return 0.0;
  if (!text::trim(s.substr(think->end, answer->open - think->end)).empty()) return 0.0;
  if (!text::trim(s.substr(answer->end)).empty()) return 0.0;
  return 1.0;
}

double answer_reward(const Completion& c, PremiseLabel gold) {
  if (!c.answer_block()) return 0.0;
  const std::string wrapped = "<answer>" + *c.answer_block() + "</answer>";
  return classify_response(wrapped, default_deny_list()) == as_verdict(gold) ? 1.0 : 0.0;
}

std::optional<int> parse_judge_score(std::string_view judge_text) {
  const auto lines = text::split_lines(judge_text);
  auto it = std::find_if(lines.rbegin(), lines.rend(),
                         [](std::string_view l) { return !text::trim(l).empty(); });
  if (it == lines.rend()) return std::nullopt;
  static const std::regex kInteger(R"((^|[^0-9.\-])(\d+)(?![0-9]|\.[0-9]))");
  const std::string line(*it);
  std::optional<int> last;
  for (auto m = std::sregex_iterator(line.begin(), line.end(), kInteger); m != std::sregex_iterator(); ++m) {
    const auto& digits = (*m)[2].str();
    last = digits.size() > 3 ? 1000 : std::stoi(digits);
  }
  if (!last || *last < 0 || *last > 5) return std::nullopt;
  return last;
}

JudgeResult reasoning_reward(const Completion& completion, std::string_view question,
                             PremiseLabel gold, const JudgeClient& judge,
                             const TemplateStore& templates, std::string_view fixture_id) {
  if (judge.backend == nullptr) throw PreconditionError("reasoning_reward: judge is not configured");
  ChatRequest req = render(templates.get(judge.template_key),
                           {{"question", std::string(question)},
                            {"think", completion.think_block().value_or("")},
                            {"answer", completion.answer_block().value_or("")},
                            {"gold_verdict", gold == PremiseLabel::FalsePremise ? "FALSE_PREMISE" : "VALID"}});
  req.model_name = judge.model_name;
  req.temperature = judge.temperature;
  req.max_tokens = judge.max_tokens;
  req.fixture_key = "judge:" + std::string(fixture_id);
  const auto response = complete(*judge.backend, req);

  JudgeResult result;
  result.score = parse_judge_score(response.text);
  if (!result.score) {
    result.warning = "judge reply has no 0-5 score on its last line";
    spdlog::warn("reasoning reward for {}: {}", fixture_id, *result.warning);
    return result;
  }
  result.reward = *result.score / 5.0;
  return result;
}

double combine(double format, double answer, double reasoning, const RewardWeights& w) {
  w.validate();
  return (w.format * format + w.answer * answer + w.reasoning * reasoning) /
         (w.format + w.answer + w.reasoning);
}

RewardBreakdown total_reward(const Completion& completion, PremiseLabel gold,
                             std::string_view question, const JudgeClient& judge,
                             const TemplateStore& templates, const RewardWeights& weights,
                             std::string_view fixture_id) {
  weights.validate();
  RewardBreakdown b;
  b.weights = weights;
  b.format = format_reward(completion);
  b.answer = answer_reward(completion, gold);
  if (b.format == 0.0) {
    b.reasoning_skipped = true;
  } else {
    auto judged = reasoning_reward(completion, question, gold, judge, templates, fixture_id);
    b.reasoning = judged.reward;
    b.judge_warning = std::move(judged.warning);
  }
  b.total = combine(b.format, b.answer, b.reasoning, weights);
  return b;
}

nlohmann::ordered_json to_json(const RewardBreakdown& b) {
  nlohmann::ordered_json j;
  j["format"] = b.format;
  j["answer"] = b.answer;
  j["reasoning"] = b.reasoning;
  j["total"] = b.total;
  j["weights"] = {b.weights.format, b.weights.answer, b.weights.reasoning};
  j["reasoning_skipped"] = b.reasoning_skipped;
  j["judge_warning"] = b.judge_warning ? nlohmann::ordered_json(*b.judge_warning)
                                       : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace premise_forge::rewards
