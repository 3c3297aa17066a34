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

#include <doctest.h>

#include "premise_forge/errors.hpp"
#include "premise_forge/evaluator.hpp"
#include "support/classify_cases.hpp"
#include "support/helpers.hpp"

using namespace premise_forge;

TEST_CASE("classify_response precedence table") {
  for (const auto& c : testing::kClassifyCases) {
    CAPTURE(c.text);
    CHECK(classify_response(c.text, default_deny_list()) == c.expected);
  }
}

TEST_CASE("classify_response without fallback only reads answer blocks") {
  CHECK(classify_response("a false premise", default_deny_list(), false) == Verdict::Unparseable);
  CHECK(classify_response("The sign is red.", default_deny_list(), false) == Verdict::Unparseable);
  CHECK(classify_response("<answer>VALID</answer>", default_deny_list(), false) == Verdict::TruePremise);
  const std::vector<std::string> custom{"nope"};
  CHECK(classify_response("nope", custom) == Verdict::FalsePremise);
}

namespace {

std::vector<QuestionSample> small_split() {
  return {testing::make_sample("a", PremiseSubtype::Scene, PremiseLabel::FalsePremise, "Why is it snowing?"),
          testing::make_sample("b", PremiseSubtype::Scene, PremiseLabel::TruePremise, "What is on the table?"),
          testing::make_sample("c", PremiseSubtype::TextualContent, PremiseLabel::TruePremise, "What does it say?")};
}

}  // namespace

TEST_CASE("evaluate_model propagates fixtures in dataset order") {
  const auto split = small_split();
  auto backend = MockBackend::from_json({{"eval:*", "<think>no</think><answer>FALSE_PREMISE: not so</answer>"}});
  EvaluationConfig cfg;
  cfg.model_name = "m";
  cfg.concurrency = 3;
  const auto preds = evaluate_model(split, cfg, *backend, TemplateStore::builtin());
  REQUIRE(preds.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(preds[i].sample_id == split[i].sample_id);
    CHECK(preds[i].gold_label == split[i].label);
    CHECK(preds[i].subtype == split[i].subtype);
    CHECK(preds[i].predicted == Verdict::FalsePremise);
  }
}

TEST_CASE("evaluate_model isolates a timed-out item") {
  const auto split = small_split();
  nlohmann::json fx = {{"eval:*", "<answer>VALID: a cup.</answer>"}};
  fx["eval:" + split[1].sample_id] = {{"error", "timeout"}};
  auto backend = MockBackend::from_json(fx);
  EvaluationConfig cfg;
  const auto first = evaluate_model(split, cfg, *backend, TemplateStore::builtin());
  CHECK(first[0].predicted == Verdict::TruePremise);
  CHECK(first[1].predicted == Verdict::Unparseable);
  CHECK(first[1].raw_response.rfind("ERROR: ", 0) == 0);
  CHECK(first[2].predicted == Verdict::TruePremise);
  CHECK(evaluate_model(split, cfg, *backend, TemplateStore::builtin()) == first);
}

TEST_CASE("evaluate_model attaches images and validates config") {
  const auto split = small_split();
  auto backend = MockBackend::from_json({{"eval:*", "ok then fine"}});
  EvaluationConfig cfg;
  ImageResolver only_a = [](const std::string& id) -> std::optional<std::string> {
    if (id == "a") return "https://example.org/a.png";
    return std::nullopt;
  };
  const auto preds = evaluate_model(split, cfg, *backend, TemplateStore::builtin(), only_a);
  CHECK(preds[0].predicted == Verdict::TruePremise);
  CHECK(preds[1].predicted == Verdict::Unparseable);

  EvaluationConfig bad;
  bad.deny_list.clear();
  CHECK_THROWS_AS(evaluate_model(split, bad, *backend, TemplateStore::builtin()), ConfigError);
  CHECK_THROWS_AS(evaluate_model(std::vector<QuestionSample>{}, cfg, *backend, TemplateStore::builtin()),
                  PreconditionError);
}
