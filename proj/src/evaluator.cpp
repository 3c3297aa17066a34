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

#include "premise_forge/evaluator.hpp"

#include <spdlog/spdlog.h>

#include <cctype>

#include "premise_forge/errors.hpp"
#include "premise_forge/parallel.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge {
namespace {

constexpr std::string_view kOpen = "<answer>";
constexpr std::string_view kClose = "</answer>";

std::optional<std::string_view> first_answer_block(std::string_view s) {
  const auto open = s.find(kOpen);
  if (open == std::string_view::npos) return std::nullopt;
  const auto body = open + kOpen.size();
  const auto close = s.find(kClose, body);
  if (close == std::string_view::npos) return std::nullopt;
  return s.substr(body, close - body);
}

// Text outside any tag markup, for the word count in rule 3.
std::string strip_tags(std::string_view s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') {
      in_tag = true;
      out.push_back(' ');
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      out.push_back(c);
    }
  }
  return out;
}

// `token` at the start of `body`, not followed by a word character.
bool starts_with_token(std::string_view body, std::string_view token) {
  if (!text::istarts_with(body, token)) return false;
  if (body.size() == token.size()) return true;
  const unsigned char next = static_cast<unsigned char>(body[token.size()]);
  return !(std::isalnum(next) || next == '_');
}

}  // namespace

const std::vector<std::string>& default_deny_list() {
  static const std::vector<std::string> kList{"false premise", "incorrect premise",
                                              "premise is wrong", "does not exist in the image"};
  return kList;
}

Verdict classify_response(std::string_view raw_text, std::span<const std::string> deny_list,
                          bool fallback) {
  if (auto block = first_answer_block(raw_text)) {
    const auto body = text::trim(*block);
    if (starts_with_token(body, "FALSE_PREMISE")) return Verdict::FalsePremise;
    if (starts_with_token(body, "VALID")) return Verdict::TruePremise;
  }
  if (!fallback) return Verdict::Unparseable;
  for (const auto& phrase : deny_list) {
    if (!phrase.empty() && text::icontains(raw_text, phrase)) return Verdict::FalsePremise;
  }
  if (text::count_words(strip_tags(raw_text)) >= 3) return Verdict::TruePremise;
  return Verdict::Unparseable;
}

void EvaluationConfig::validate() const {
  if (fallback_parsing && deny_list.empty()) {
    throw ConfigError("evaluation deny-list must be non-empty when fallback parsing is enabled");
  }
  if (concurrency == 0) throw ConfigError("evaluation concurrency must be >= 1");
}

std::vector<PredictionRecord> evaluate_model(std::span<const QuestionSample> split,
                                             const EvaluationConfig& config,
                                             const ChatBackend& client,
                                             const TemplateStore& templates,
                                             const ImageResolver& images) {
  if (split.empty()) throw PreconditionError("evaluate_model: empty split");
  config.validate();
  const PromptTemplate& tmpl = templates.get(config.template_key);

  auto results = parallel_map(split.size(), config.concurrency, [&](std::size_t i) {
    const QuestionSample& s = split[i];
    std::vector<std::string> attachments;
    if (images) {
      auto loc = images(s.image_id);
      if (!loc) throw PreconditionError("image '" + s.image_id + "' is not in the manifest");
      attachments.push_back(std::move(*loc));
    }
    ChatRequest req = render(tmpl, {{"question", s.question}}, attachments);
    req.model_name = config.model_name;
    req.temperature = config.temperature;
    req.max_tokens = config.max_tokens;
    req.fixture_key = "eval:" + s.sample_id;
    return complete(client, req).text;
  });

  std::vector<PredictionRecord> out;
  out.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    const QuestionSample& s = split[i];
    PredictionRecord rec;
    rec.sample_id = s.sample_id;
    rec.gold_label = s.label;
    rec.subtype = s.subtype;
    if (results[i].ok()) {
      rec.raw_response = std::move(*results[i].value);
      rec.predicted = classify_response(rec.raw_response, config.deny_list, config.fallback_parsing);
    } else {
      try {
        std::rethrow_exception(results[i].error);
      } catch (const std::exception& e) {
        rec.raw_response = std::string("ERROR: ") + e.what();
      }
      rec.predicted = Verdict::Unparseable;
      spdlog::warn("evaluation of {} failed: {}", s.sample_id, rec.raw_response);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace premise_forge
