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

#include "premise_forge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "premise_forge/errors.hpp"
#include "premise_forge/random.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge::dataset {
namespace {

constexpr std::array<std::string_view, 10> kFields{
    "sample_id",        "image_id", "level", "subtype",         "original_premise",
    "embedded_premise", "question", "label", "reference_answer", "generator_metadata"};

const nlohmann::json& require(const nlohmann::json& j, std::string_view field, std::size_t lineno) {
  auto it = j.find(field);
  if (it == j.end()) throw InvariantViolation(lineno, std::string(field), "missing");
  return *it;
}

std::string require_string(const nlohmann::json& j, std::string_view field, std::size_t lineno,
                           bool non_empty = true) {
  const auto& v = require(j, field, lineno);
  if (!v.is_string()) throw InvariantViolation(lineno, std::string(field), "must be a string");
  auto s = v.get<std::string>();
  if (non_empty && text::trim(s).empty()) {
    throw InvariantViolation(lineno, std::string(field), "must be non-empty");
  }
  return s;
}

bool is_hex16(std::string_view s) {
  return s.size() == 16 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("dataset file not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fisher-Yates with the library PRNG so shuffles are identical on every platform.
template <class T>
void shuffle(std::vector<T>& v, Pcg64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.bounded(i)]);
  }
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitFractions& f) {
  const std::array<double, 3> share{f.eval * n, f.sft * n, f.rl * n};
  std::array<std::size_t, 3> count{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    count[k] = static_cast<std::size_t>(std::floor(share[k] + 1e-9));
    assigned += count[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return share[a] - count[a] > share[b] - count[b];
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    ++count[order[k]];
    ++assigned;
  }
  return count;
}

}  // namespace

void validate(const QuestionSample& s, std::size_t lineno) {
  if (!is_hex16(s.sample_id)) {
    throw InvariantViolation(lineno, "sample_id", "must be 16 lowercase hex characters");
  }
  if (text::trim(s.image_id).empty()) throw InvariantViolation(lineno, "image_id", "must be non-empty");
  if (s.level != level_of(s.subtype)) {
    throw InvariantViolation(lineno, "level", "does not match the subtype's level");
  }
  if (text::trim(s.original_premise).empty()) {
    throw InvariantViolation(lineno, "original_premise", "must be non-empty");
  }
  if (text::trim(s.embedded_premise).empty()) {
    throw InvariantViolation(lineno, "embedded_premise", "must be non-empty");
  }
  if (text::trim(s.question).empty()) throw InvariantViolation(lineno, "question", "must be non-empty");
  if (s.label == PremiseLabel::FalsePremise &&
      text::normalize_premise(s.embedded_premise) == text::normalize_premise(s.original_premise)) {
    throw InvariantViolation(lineno, "embedded_premise",
                             "false-premise sample embeds the original premise");
  }
  if (s.label == PremiseLabel::TruePremise && s.embedded_premise != s.original_premise) {
    throw InvariantViolation(lineno, "embedded_premise",
                             "true-premise sample must embed the original premise");
  }
  if (!s.generator_metadata.is_object()) {
    throw InvariantViolation(lineno, "generator_metadata", "must be an object");
  }
  if (s.sample_id != compute_sample_id(s.image_id, s.subtype, s.label, s.question)) {
    throw InvariantViolation(lineno, "sample_id", "does not match the content hash");
  }
}

QuestionSample parse_sample(std::string_view line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(lineno, e.what());
  }
  if (!j.is_object()) throw InvariantViolation(lineno, "<record>", "must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
      throw InvariantViolation(lineno, key, "unknown field");
    }
  }

  QuestionSample s;
  s.sample_id = require_string(j, "sample_id", lineno);
  s.image_id = require_string(j, "image_id", lineno);
  const auto level = parse_level(require_string(j, "level", lineno));
  if (!level) throw InvariantViolation(lineno, "level", "unknown level");
  s.level = *level;
  const auto subtype = parse_subtype(require_string(j, "subtype", lineno));
  if (!subtype) throw InvariantViolation(lineno, "subtype", "unknown subtype");
  s.subtype = *subtype;
  s.original_premise = require_string(j, "original_premise", lineno);
  s.embedded_premise = require_string(j, "embedded_premise", lineno);
  s.question = require_string(j, "question", lineno);
  const auto label = parse_label(require_string(j, "label", lineno));
  if (!label) throw InvariantViolation(lineno, "label", "must be false_premise or true_premise");
  s.label = *label;
  const auto& answer = require(j, "reference_answer", lineno);
  if (answer.is_string()) {
    s.reference_answer = answer.get<std::string>();
  } else if (!answer.is_null()) {
    throw InvariantViolation(lineno, "reference_answer", "must be a string or null");
  }
  s.generator_metadata = require(j, "generator_metadata", lineno);
  validate(s, lineno);
  return s;
}

LoadResult parse_with_issues(std::string_view contents) {
  LoadResult result;
  std::set<std::string> seen;
  std::size_t lineno = 0;
  for (auto line : text::split_lines(contents)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto s = parse_sample(line, lineno);
      if (!seen.insert(s.sample_id).second) {
        throw InvariantViolation(lineno, "sample_id", "duplicate sample_id " + s.sample_id);
      }
      result.samples.push_back(std::move(s));
    } catch (const InvariantViolation& e) {
      result.issues.push_back({e.line(), e.field(), e.detail()});
    } catch (const ParseError& e) {
      result.issues.push_back({e.line(), "", e.detail()});
    }
  }
  return result;
}

LoadResult load_with_issues(const std::filesystem::path& path) {
  return parse_with_issues(read_all(path));
}

std::vector<QuestionSample> load(const std::filesystem::path& path) {
  auto result = load_with_issues(path);
  if (!result.issues.empty()) {
    const auto& first = result.issues.front();
    if (first.field.empty()) throw ParseError(first.line, first.message);
    throw InvariantViolation(first.line, first.field, first.message);
  }
  return std::move(result.samples);
}

std::string serialize(std::span<const QuestionSample> samples) {
  std::string out;
  for (const auto& s : samples) out += to_jsonl_line(s);
  return out;
}

void save(const std::filesystem::path& path, std::span<const QuestionSample> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize(samples);
  if (!out) throw Error("write failed on " + path.string());
}

PredictionRecord parse_prediction(std::string_view line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(lineno, e.what());
  }
  if (!j.is_object()) throw InvariantViolation(lineno, "<record>", "must be a JSON object");
  PredictionRecord r;
  r.sample_id = require_string(j, "sample_id", lineno);
  const auto gold = parse_label(require_string(j, "gold_label", lineno));
  if (!gold) throw InvariantViolation(lineno, "gold_label", "must be false_premise or true_premise");
  r.gold_label = *gold;
  const auto predicted = parse_verdict(require_string(j, "predicted", lineno));
  if (!predicted) {
    throw InvariantViolation(lineno, "predicted",
                             "must be false_premise, true_premise or unparseable");
  }
  r.predicted = *predicted;
  r.raw_response = require_string(j, "raw_response", lineno, false);
  const auto subtype = parse_subtype(require_string(j, "subtype", lineno));
  if (!subtype) throw InvariantViolation(lineno, "subtype", "unknown subtype");
  r.subtype = *subtype;
  return r;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  const auto contents = read_all(path);
  std::vector<PredictionRecord> out;
  std::size_t lineno = 0;
  for (auto line : text::split_lines(contents)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    out.push_back(parse_prediction(line, lineno));
  }
  return out;
}

void save_predictions(const std::filesystem::path& path, std::span<const PredictionRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << to_jsonl_line(r);
  if (!out) throw Error("write failed on " + path.string());
}

std::string_view to_string(SplitName name) noexcept {
  switch (name) {
    case SplitName::Eval: return "eval";
    case SplitName::Sft: return "sft";
    case SplitName::Rl: return "rl";
  }
  return "";
}

std::array<DatasetSplit, 3> split(std::span<const QuestionSample> samples,
                                  const SplitFractions& fractions, std::uint64_t seed) {
  for (double f : {fractions.eval, fractions.sft, fractions.rl}) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw PreconditionError("split fractions must be >= 0");
  }
  if (std::abs(fractions.eval + fractions.sft + fractions.rl - 1.0) > 1e-9) {
    throw PreconditionError("split fractions must sum to 1");
  }
  {
    std::set<std::string_view> ids;
    for (const auto& s : samples) {
      if (!ids.insert(s.sample_id).second) {
        throw PreconditionError("duplicate sample_id " + s.sample_id);
      }
    }
  }

  // Stratum key doubles as the PRNG stream, so each stratum's shuffle does
  // not depend on which other strata are present.
  std::map<std::uint64_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto key = 2 * index_of(samples[i].subtype) + (samples[i].label == PremiseLabel::TruePremise);
    strata[key].push_back(i);
  }

  // Each stratum gets floor(n * f) per split; the leftover units go, one per
  // split at most, to the splits furthest below their global largest-remainder
  // target. Strata are visited in a seeded order so no subtype is favoured.
  const std::array<double, 3> frac{fractions.eval, fractions.sft, fractions.rl};
  auto need = apportion(samples.size(), fractions);
  std::map<std::uint64_t, std::array<std::size_t, 3>> counts;
  std::vector<std::uint64_t> order;
  for (auto& [key, members] : strata) {
    const auto n = members.size();
    auto& c = counts[key];
    for (std::size_t k = 0; k < 3; ++k) {
      c[k] = static_cast<std::size_t>(std::floor(frac[k] * static_cast<double>(n) + 1e-9));
      need[k] -= std::min(need[k], c[k]);
    }
    order.push_back(key);
  }
  {
    Pcg64 rng(seed, std::uint64_t{1} << 32);
    shuffle(order, rng);
  }
  for (auto key : order) {
    const auto& members = strata.at(key);
    auto& c = counts[key];
    const std::size_t answered = static_cast<std::size_t>(std::count_if(
        members.begin(), members.end(), [&](std::size_t i) { return samples[i].reference_answer.has_value(); }));
    std::array<bool, 3> took{};
    for (std::size_t left = members.size() - (c[0] + c[1] + c[2]); left > 0; --left) {
      std::optional<std::size_t> best;
      double best_rem = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double rem = frac[k] * static_cast<double>(members.size()) - static_cast<double>(c[k]);
        if (took[k] || rem <= 1e-9) continue;
        if (k == 1 && c[1] + 1 > answered) continue;
        if (!best || need[k] > need[*best] || (need[k] == need[*best] && rem > best_rem + 1e-12)) {
          best = k;
          best_rem = rem;
        }
      }
      if (!best) {  // only reachable when sft is short of answered samples
        for (std::size_t k = 0; k < 3 && !best; ++k) {
          if (!took[k] && k != 1 && frac[k] > 0.0) best = k;
        }
      }
      if (!best) best = 0;
      took[*best] = true;
      ++c[*best];
      if (need[*best] > 0) --need[*best];
    }
  }

  std::vector<SplitName> assignment(samples.size(), SplitName::Eval);
  for (auto& [key, members] : strata) {
    const auto& count = counts.at(key);
    std::vector<std::size_t> answered;
    std::vector<std::size_t> rest;
    for (auto i : members) (samples[i].reference_answer ? answered : rest).push_back(i);
    if (answered.size() < count[1]) {
      const auto& s = samples[members.front()];
      throw InsufficientAnswered("stratum " + std::string(premise_forge::to_string(s.subtype)) + "/" +
                                 std::string(premise_forge::to_string(s.label)) + " needs " +
                                 std::to_string(count[1]) + " answered samples for sft, has " +
                                 std::to_string(answered.size()));
    }
    Pcg64 rng(seed, key);
    shuffle(answered, rng);
    for (std::size_t k = 0; k < answered.size(); ++k) {
      if (k < count[1]) {
        assignment[answered[k]] = SplitName::Sft;
      } else {
        rest.push_back(answered[k]);
      }
    }
    std::sort(rest.begin(), rest.end());
    shuffle(rest, rng);
    for (std::size_t k = 0; k < rest.size(); ++k) {
      assignment[rest[k]] = k < count[0] ? SplitName::Eval : SplitName::Rl;
    }
  }

  std::array<DatasetSplit, 3> out{
      DatasetSplit{SplitName::Eval, {}}, DatasetSplit{SplitName::Sft, {}}, DatasetSplit{SplitName::Rl, {}}};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[static_cast<std::size_t>(assignment[i])].samples.push_back(samples[i]);
  }
  return out;
}

}  // namespace premise_forge::dataset
