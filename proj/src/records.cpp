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

#include "premise_forge/records.hpp"

#include "premise_forge/hashing.hpp"

namespace premise_forge {

std::string_view to_string(PremiseLabel label) noexcept {
  return label == PremiseLabel::FalsePremise ? "false_premise" : "true_premise";
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::FalsePremise: return "false_premise";
    case Verdict::TruePremise: return "true_premise";
    case Verdict::Unparseable: return "unparseable";
  }
  return "";
}

std::optional<PremiseLabel> parse_label(std::string_view s) noexcept {
  if (s == "false_premise") return PremiseLabel::FalsePremise;
  if (s == "true_premise") return PremiseLabel::TruePremise;
  return std::nullopt;
}

std::optional<Verdict> parse_verdict(std::string_view s) noexcept {
  if (s == "false_premise") return Verdict::FalsePremise;
  if (s == "true_premise") return Verdict::TruePremise;
  if (s == "unparseable") return Verdict::Unparseable;
  return std::nullopt;
}

Verdict as_verdict(PremiseLabel label) noexcept {
  return label == PremiseLabel::FalsePremise ? Verdict::FalsePremise : Verdict::TruePremise;
}

std::string compute_sample_id(std::string_view image_id, PremiseSubtype subtype,
                              PremiseLabel label, std::string_view question) {
  std::string buf;
  buf.reserve(image_id.size() + question.size() + 40);
  buf.append(image_id);
  buf.push_back('\x1f');
  buf.append(to_string(subtype));
  buf.push_back('\x1f');
  buf.append(to_string(label));
  buf.push_back('\x1f');
  buf.append(question);
  return sha256_hex(buf).substr(0, 16);
}

nlohmann::ordered_json to_json(const QuestionSample& s) {
  nlohmann::ordered_json j;
  j["sample_id"] = s.sample_id;
  j["image_id"] = s.image_id;
  j["level"] = to_string(s.level);
  j["subtype"] = to_string(s.subtype);
  j["original_premise"] = s.original_premise;
  j["embedded_premise"] = s.embedded_premise;
  j["question"] = s.question;
  j["label"] = to_string(s.label);
  j["reference_answer"] = s.reference_answer ? nlohmann::ordered_json(*s.reference_answer)
                                             : nlohmann::ordered_json(nullptr);
  // Round-trip through the sorted-key type so metadata keys are emitted sorted.
  j["generator_metadata"] = nlohmann::ordered_json::parse(s.generator_metadata.dump());
  return j;
}

nlohmann::ordered_json to_json(const PredictionRecord& r) {
  nlohmann::ordered_json j;
  j["sample_id"] = r.sample_id;
  j["gold_label"] = to_string(r.gold_label);
  j["predicted"] = to_string(r.predicted);
  j["raw_response"] = r.raw_response;
  j["subtype"] = to_string(r.subtype);
  return j;
}

namespace {

// Invalid UTF-8 in model output is replaced with U+FFFD rather than aborting a run.
std::string dump_line(const nlohmann::ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace

std::string to_jsonl_line(const QuestionSample& sample) { return dump_line(to_json(sample)); }
std::string to_jsonl_line(const PredictionRecord& record) { return dump_line(to_json(record)); }

}  // namespace premise_forge
