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

#include <map>
#include <random>
#include <set>

#include "premise_forge/dataset.hpp"
#include "premise_forge/errors.hpp"
#include "support/generators.hpp"
#include "support/helpers.hpp"

using namespace premise_forge;
using namespace premise_forge::dataset;

namespace {

std::vector<QuestionSample> grid_26(bool with_answers) {
  std::vector<QuestionSample> out;
  for (auto s : all_subtypes()) {
    for (auto label : {PremiseLabel::TruePremise, PremiseLabel::FalsePremise}) {
      auto q = testing::make_sample("img", s, label, std::string(to_string(s)) + " question?");
      if (with_answers) q.reference_answer = "answer";
      out.push_back(q);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sample_id is a deterministic content hash") {
  const auto a = compute_sample_id("img1", PremiseSubtype::Scene, PremiseLabel::TruePremise, "Why?");
  CHECK(a.size() == 16);
  CHECK(a == compute_sample_id("img1", PremiseSubtype::Scene, PremiseLabel::TruePremise, "Why?"));
  CHECK(a != compute_sample_id("img1", PremiseSubtype::Scene, PremiseLabel::FalsePremise, "Why?"));
  CHECK(a != compute_sample_id("img2", PremiseSubtype::Scene, PremiseLabel::TruePremise, "Why?"));
}

TEST_CASE("canonical field order and LF termination") {
  const auto s = testing::make_sample("img1", PremiseSubtype::SymbolicMeaning, PremiseLabel::FalsePremise,
                                      "Given that the sign means yield, what color is it?");
  const auto line = to_jsonl_line(s);
  CHECK(line.back() == '\n');
  const char* order[] = {"sample_id",        "image_id", "level", "subtype",          "original_premise",
                         "embedded_premise", "question", "label", "reference_answer", "generator_metadata"};
  std::size_t pos = 0;
  for (const char* f : order) {
    const auto at = line.find(std::string("\"") + f + "\":");
    REQUIRE(at != std::string::npos);
    CHECK(at >= pos);
    pos = at;
  }
  CHECK(line.find("\"label\":\"false_premise\"") != std::string::npos);
  CHECK(line.find("\"reference_answer\":null") != std::string::npos);
}

TEST_CASE("load(save(x)) == x and re-serialization is byte-identical") {
  std::mt19937_64 gen(99);
  std::vector<QuestionSample> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(testing::random_sample(gen));
  std::set<std::string> ids;
  std::vector<QuestionSample> unique;
  for (auto& x : xs) {
    if (ids.insert(x.sample_id).second) unique.push_back(x);
  }
  testing::TempDir dir;
  save(dir / "d.jsonl", unique);
  const auto back = load(dir / "d.jsonl");
  CHECK(back == unique);
  CHECK(serialize(back) == testing::read_file(dir / "d.jsonl"));
}

TEST_CASE("load rejects invariant violations with line numbers") {
  testing::TempDir dir;
  auto good = testing::make_sample("i", PremiseSubtype::Scene, PremiseLabel::TruePremise, "Q?");
  auto j = to_json(good);
  j["label"] = "maybe";
  testing::write_file(dir / "a.jsonl", to_jsonl_line(good) + j.dump() + "\n");
  try {
    load(dir / "a.jsonl");
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    CHECK(e.line() == 2);
    CHECK(e.field() == "label");
    CHECK(std::string(e.what()) == "line 2, field 'label': must be false_premise or true_premise");
  }

  auto fp = testing::make_sample("i", PremiseSubtype::Scene, PremiseLabel::FalsePremise, "Q?");
  fp.embedded_premise = fp.original_premise;
  testing::write_file(dir / "b.jsonl", to_jsonl_line(fp));
  CHECK_THROWS_AS(load(dir / "b.jsonl"), InvariantViolation);

  testing::write_file(dir / "c.jsonl", "\n{not json\n");
  try {
    load(dir / "c.jsonl");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("the corrupted corpus reports every bad line") {
  const auto result = load_with_issues(std::string(PF_TEST_DATA) + "/corrupted.jsonl");
  const std::vector<std::pair<std::size_t, std::string>> expected = {
      {3, "label"},  {4, "embedded_premise"},   {6, "embedded_premise"}, {7, ""},
      {8, "subtype"}, {10, "level"},            {11, "question"},        {12, "generator_metadata"},
      {14, "score"},  {15, "sample_id"},        {16, "reference_answer"}, {17, "sample_id"}};
  REQUIRE(result.issues.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(result.issues[i].line == expected[i].first);
    CHECK(result.issues[i].field == expected[i].second);
  }
  CHECK(result.samples.size() == 6);
}

TEST_CASE("predictions round-trip") {
  std::vector<PredictionRecord> ps = {
      {"0123456789abcdef", PremiseLabel::FalsePremise, Verdict::Unparseable, "", PremiseSubtype::Scene},
      {"fedcba9876543210", PremiseLabel::TruePremise, Verdict::TruePremise, "<answer>VALID ok</answer>\n",
       PremiseSubtype::TextualContent}};
  testing::TempDir dir;
  save_predictions(dir / "p.jsonl", ps);
  CHECK(load_predictions(dir / "p.jsonl") == ps);
  CHECK(testing::read_file(dir / "p.jsonl").rfind("{\"sample_id\":\"0123456789abcdef\",\"gold_label\"", 0) == 0);
}

TEST_CASE("split: degenerate fractions") {
  const auto xs = grid_26(false);
  const auto parts = split(xs, {1.0, 0.0, 0.0}, 3);
  CHECK(parts[0].samples == xs);
  CHECK(parts[1].samples.empty());
  CHECK(parts[2].samples.empty());
  CHECK_THROWS_AS(split(xs, {0.5, 0.5, 0.5}, 3), PreconditionError);
  CHECK_THROWS_AS(split(xs, {1.5, -0.5, 0.0}, 3), PreconditionError);
}

TEST_CASE("split: stratified, a partition, deterministic") {
  const auto xs = grid_26(true);
  const auto a = split(xs, {0.5, 0.25, 0.25}, 7);
  const auto b = split(xs, {0.5, 0.25, 0.25}, 7);
  for (int k = 0; k < 3; ++k) CHECK(a[k].samples == b[k].samples);

  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto& part : a) {
    for (const auto& s : part.samples) CHECK(seen.insert(s.sample_id).second);
    total += part.samples.size();
  }
  CHECK(total == xs.size());
  // One sample per stratum: each split gets 0 or 1, within one of 0.5/0.25/0.25.
  const double frac[3] = {0.5, 0.25, 0.25};
  for (int k = 0; k < 3; ++k) {
    std::map<std::pair<PremiseSubtype, PremiseLabel>, int> per;
    for (const auto& s : a[k].samples) ++per[{s.subtype, s.label}];
    for (const auto& x : xs) CHECK(std::abs(per[{x.subtype, x.label}] - frac[k]) <= 1.0);
  }
  CHECK(a[0].samples.size() == 13);
  CHECK(a[1].samples.size() + a[2].samples.size() == 13);
  for (const auto& s : a[1].samples) CHECK(s.reference_answer.has_value());
}

TEST_CASE("split: larger strata stay within one of their share") {
  std::vector<QuestionSample> xs;
  for (int i = 0; i < 37; ++i) {
    auto s = testing::make_sample("im" + std::to_string(i), i % 2 ? PremiseSubtype::Scene : PremiseSubtype::TextualContent,
                                  i % 3 ? PremiseLabel::TruePremise : PremiseLabel::FalsePremise, "Q?");
    s.reference_answer = "a";
    xs.push_back(s);
  }
  const double frac[3] = {0.6, 0.3, 0.1};
  const auto parts = split(xs, {0.6, 0.3, 0.1}, 11);
  std::map<std::pair<PremiseSubtype, PremiseLabel>, int> n;
  for (const auto& x : xs) ++n[{x.subtype, x.label}];
  for (int k = 0; k < 3; ++k) {
    std::map<std::pair<PremiseSubtype, PremiseLabel>, int> per;
    for (const auto& s : parts[k].samples) ++per[{s.subtype, s.label}];
    for (const auto& [key, count] : n) CHECK(std::abs(per[key] - frac[k] * count) < 1.0);
  }
  // Output keeps input order.
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < xs.size(); ++i) position[xs[i].sample_id] = i;
  for (const auto& part : parts) {
    for (std::size_t i = 1; i < part.samples.size(); ++i) {
      CHECK(position[part.samples[i - 1].sample_id] < position[part.samples[i].sample_id]);
    }
  }
}

TEST_CASE("split: sft needs answered samples") {
  const auto xs = grid_26(false);
  std::vector<QuestionSample> doubled;
  for (int copy = 0; copy < 4; ++copy) {
    for (auto s : xs) {
      s.question = std::to_string(copy) + s.question;
      s.sample_id = compute_sample_id(s.image_id, s.subtype, s.label, s.question);
      doubled.push_back(s);
    }
  }
  CHECK_THROWS_AS(split(doubled, {0.5, 0.25, 0.25}, 1), InsufficientAnswered);
  CHECK_NOTHROW(split(doubled, {0.5, 0.0, 0.5}, 1));
}
