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

#include "premise_forge/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <mutex>

#include "premise_forge/errors.hpp"
#include "premise_forge/evaluator.hpp"
#include "premise_forge/parallel.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge {
namespace {

std::string fixture_key(std::string_view stage, std::string_view image_id,
                        PremiseSubtype subtype, int attempt = 1) {
  std::string key = std::string(stage) + ":" + std::string(image_id) + ":" +
                    std::string(to_string(subtype));
  if (attempt > 1) key += "#" + std::to_string(attempt);
  return key;
}

std::string_view strip_quotes(std::string_view s) {
  s = text::trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = text::trim(s.substr(1, s.size() - 2));
  }
  return s;
}

bool is_resolvable(const std::string& location) {
  if (text::istarts_with(location, "http://") || text::istarts_with(location, "https://") ||
      text::istarts_with(location, "data:")) {
    return true;
  }
  std::error_code ec;
  return std::filesystem::is_regular_file(location, ec);
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

std::vector<ImageEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("manifest not found: " + path.string());
  const auto base = path.parent_path();
  std::vector<ImageEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(lineno, "manifest line must be image_id<TAB>path-or-url");
    }
    ImageEntry e{std::string(text::trim(t.substr(0, tab))),
                 std::string(text::trim(t.substr(tab + 1)))};
    if (e.image_id.empty() || e.location.empty()) {
      throw ParseError(lineno, "manifest line has an empty field");
    }
    const bool remote = text::istarts_with(e.location, "http://") ||
                        text::istarts_with(e.location, "https://") ||
                        text::istarts_with(e.location, "data:");
    if (!remote && std::filesystem::path(e.location).is_relative()) {
      e.location = (base / e.location).lexically_normal().string();
    }
    out.push_back(std::move(e));
  }
  return out;
}

PremiseRecord parse_extraction(std::string_view image_id, PremiseSubtype subtype,
                               std::string_view response) {
  PremiseRecord rec;
  rec.image_id = std::string(image_id);
  rec.subtype = subtype;
  auto t = text::trim(response);
  auto token = t;
  if (!token.empty() && token.back() == '.') token.remove_suffix(1);
  if (text::fold_case(token) == "no") {
    rec.status = PremiseStatus::Absent;
    return rec;
  }
  if (text::istarts_with(t, "premise:")) t.remove_prefix(8);
  const auto content = strip_quotes(t);
  if (content.empty()) {
    throw MalformedExtraction("extraction for " + std::string(image_id) + "/" +
                              std::string(to_string(subtype)) + " is neither NO nor a premise");
  }
  rec.status = PremiseStatus::Found;
  rec.content = std::string(content);
  return rec;
}

// Sinks ------------------------------------------------------------------------

struct JsonlSampleSink::Impl {
  std::ofstream out;
  std::mutex mu;
  std::filesystem::path path;
};

JsonlSampleSink::JsonlSampleSink(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) throw Error("cannot open output file " + path.string());
}

JsonlSampleSink::~JsonlSampleSink() = default;

void JsonlSampleSink::write(const QuestionSample& sample) {
  std::lock_guard lock(impl_->mu);
  impl_->out << to_jsonl_line(sample);
  impl_->out.flush();
  if (!impl_->out) throw Error("write failed on " + impl_->path.string());
}

// Report -------------------------------------------------------------------------

SubtypeCounts PipelineReport::totals() const {
  SubtypeCounts t;
  for (const auto& [_, c] : per_subtype) {
    t.attempted += c.attempted;
    t.absent += c.absent;
    t.emitted += c.emitted;
    t.errored += c.errored;
    t.answer_failures += c.answer_failures;
  }
  return t;
}

nlohmann::ordered_json PipelineReport::to_json() const {
  auto counts_json = [](const SubtypeCounts& c) {
    nlohmann::ordered_json j;
    j["attempted"] = c.attempted;
    j["absent"] = c.absent;
    j["emitted"] = c.emitted;
    j["errored"] = c.errored;
    j["answer_failures"] = c.answer_failures;
    return j;
  };
  nlohmann::ordered_json j;
  j["images_scanned"] = images_scanned;
  j["samples_written"] = samples_written;
  j["totals"] = counts_json(totals());
  j["per_subtype"] = nlohmann::ordered_json::object();
  for (const auto& [s, c] : per_subtype) j["per_subtype"][std::string(to_string(s))] = counts_json(c);
  j["errors"] = nlohmann::ordered_json::array();
  for (const auto& e : errors) {
    j["errors"].push_back({{"image_id", e.image_id},
                           {"subtype", to_string(e.subtype)},
                           {"stage", e.stage},
                           {"message", e.message}});
  }
  j["unresolvable_images"] = unresolvable_images;
  return j;
}

// Pipeline -----------------------------------------------------------------------

struct PremisePipeline::PremiseOutcome {
  std::vector<QuestionSample> samples;
  std::size_t answer_failures = 0;
};

PremisePipeline::PremisePipeline(PipelineClients clients, TemplateStore templates,
                                 PipelineOptions options)
    : clients_(std::move(clients)), templates_(std::move(templates)), options_(options) {
  if (!clients_.extractor.backend || !clients_.question.backend) {
    throw ConfigError("pipeline needs extractor and question backends");
  }
  if (options_.caption_attempts < 1 || options_.corruption_attempts < 1) {
    throw ConfigError("attempt counts must be >= 1");
  }
}

const StageClient& PremisePipeline::answer_client() const {
  return clients_.answer.backend ? clients_.answer : clients_.question;
}

ChatResponse PremisePipeline::call(const StageClient& client, const std::string& template_key,
                                   const Bindings& bindings, std::vector<std::string> images,
                                   std::string key) const {
  ChatRequest req = render(templates_.get(template_key), bindings, images);
  req.model_name = client.model_name;
  req.temperature = client.temperature;
  req.max_tokens = client.max_tokens;
  req.fixture_key = std::move(key);
  return complete(*client.backend, req);
}

PremiseRecord PremisePipeline::extract_premise(const ImageEntry& image,
                                               PremiseSubtype subtype) const {
  const auto& meta = info(subtype);
  const auto response =
      call(clients_.extractor, std::string(meta.prompt_key),
           {{"subtype_name", std::string(meta.id)}, {"subtype_description", std::string(meta.description)}},
           {image.location}, fixture_key("extract", image.image_id, subtype));
  return parse_extraction(image.image_id, subtype, response.text);
}

CaptionRecord PremisePipeline::caption_with_premise(const ImageEntry& image, PremiseSubtype subtype,
                                                    std::string_view premise) const {
  if (text::trim(premise).empty()) throw PreconditionError("caption_with_premise: empty premise");
  std::string last_problem;
  bool too_long = false;
  for (int attempt = 1; attempt <= options_.caption_attempts; ++attempt) {
    const auto response = call(clients_.extractor, "caption", {{"premise", std::string(premise)}},
                               {image.location},
                               fixture_key("caption", image.image_id, subtype, attempt));
    const auto caption = text::trim(response.text);
    if (caption.size() > options_.caption_max_chars) {
      too_long = true;
      last_problem = "caption exceeds " + std::to_string(options_.caption_max_chars) + " characters";
      continue;
    }
    too_long = false;
    const double coverage = caption.empty() ? 0.0 : text::premise_coverage(premise, caption);
    if (coverage >= options_.caption_overlap_threshold) {
      return {image.image_id, std::string(premise), std::string(caption)};
    }
    last_problem = "caption covers " + std::to_string(coverage) + " of the premise's content words";
  }
  const std::string msg = "caption for " + image.image_id + "/" + std::string(to_string(subtype)) +
                          " rejected after " + std::to_string(options_.caption_attempts) +
                          " attempts: " + last_problem;
  if (too_long) throw CaptionTooLong(msg);
  throw CaptionMissingPremise(msg);
}

std::string PremisePipeline::corrupt_premise(const ImageEntry& image, PremiseSubtype subtype,
                                             std::string_view premise) const {
  if (text::trim(premise).empty()) throw PreconditionError("corrupt_premise: empty premise");
  const auto& meta = info(subtype);
  const auto original = text::normalize_premise(premise);
  for (int attempt = 1; attempt <= options_.corruption_attempts; ++attempt) {
    const auto response =
        call(clients_.question, "corrupt",
             {{"premise", std::string(premise)},
              {"subtype_name", std::string(meta.id)},
              {"subtype_description", std::string(meta.description)}},
             {}, fixture_key("corrupt", image.image_id, subtype, attempt));
    const auto candidate = strip_quotes(response.text);
    const auto normalized = text::normalize_premise(candidate);
    if (!normalized.empty() && normalized != original) return std::string(candidate);
  }
  throw CorruptionIdentical("corrupted premise for " + image.image_id + "/" +
                            std::string(to_string(subtype)) + " matched the original on all " +
                            std::to_string(options_.corruption_attempts) + " attempts");
}

std::string PremisePipeline::generate_question(const ImageEntry& image, PremiseSubtype subtype,
                                               std::string_view caption,
                                               std::string_view embedded_premise,
                                               Polarity polarity) const {
  if (text::trim(caption).empty() || text::trim(embedded_premise).empty()) {
    throw PreconditionError("generate_question: caption and premise must be non-empty");
  }
  const bool negative = polarity == Polarity::Negative;
  const auto response =
      call(clients_.question, negative ? "question_negative" : "question_positive",
           {{"caption", std::string(caption)}, {"premise", std::string(embedded_premise)}}, {},
           fixture_key(negative ? "question_neg" : "question_pos", image.image_id, subtype));
  const auto q = strip_quotes(response.text);
  if (q.empty() || q.find('?') == std::string_view::npos) {
    throw MalformedQuestion("generated question for " + image.image_id + "/" +
                            std::string(to_string(subtype)) + " has no question mark");
  }
  return std::string(q);
}

std::string PremisePipeline::generate_reference_answer(const QuestionSample& sample,
                                                       std::string_view caption) const {
  const bool fp = sample.label == PremiseLabel::FalsePremise;
  Bindings b{{"question", sample.question},
             {"caption", std::string(caption)},
             {"premise", sample.embedded_premise},
             {"embedded_premise", sample.embedded_premise},
             {"original_premise", sample.original_premise}};
  const auto response =
      call(answer_client(), fp ? "answer_false_premise" : "answer_true_premise", b, {},
           fixture_key(fp ? "answer_neg" : "answer_pos", sample.image_id, sample.subtype));
  const auto answer = text::trim(response.text);
  const auto verdict = classify_response(answer, default_deny_list());
  if (verdict != as_verdict(sample.label)) {
    throw ProtocolError("reference answer for " + sample.sample_id + " does not carry the " +
                        std::string(to_string(sample.label)) + " verdict");
  }
  return std::string(answer);
}

PremisePipeline::PremiseOutcome PremisePipeline::build_samples(const ImageEntry& image,
                                                               const PremiseRecord& premise) const {
  const auto caption = caption_with_premise(image, premise.subtype, premise.content);
  const auto corrupted = corrupt_premise(image, premise.subtype, premise.content);

  nlohmann::json meta;
  meta["extractor_model"] = clients_.extractor.model_name;
  meta["question_model"] = clients_.question.model_name;
  const std::string extract_key(info(premise.subtype).prompt_key);
  meta["templates"] = {{extract_key, templates_.get(extract_key).version()},
                       {"caption", templates_.get("caption").version()},
                       {"corrupt", templates_.get("corrupt").version()},
                       {"question_positive", templates_.get("question_positive").version()},
                       {"question_negative", templates_.get("question_negative").version()}};
  if (options_.with_answers) {
    meta["answer_model"] = answer_client().model_name;
    meta["templates"]["answer_false_premise"] = templates_.get("answer_false_premise").version();
    meta["templates"]["answer_true_premise"] = templates_.get("answer_true_premise").version();
  }

  auto make = [&](Polarity polarity) {
    QuestionSample s;
    s.image_id = image.image_id;
    s.subtype = premise.subtype;
    s.level = level_of(premise.subtype);
    s.original_premise = premise.content;
    s.embedded_premise = polarity == Polarity::Positive ? premise.content : corrupted;
    s.label = polarity == Polarity::Positive ? PremiseLabel::TruePremise : PremiseLabel::FalsePremise;
    s.question = generate_question(image, premise.subtype, caption.caption, s.embedded_premise, polarity);
    s.sample_id = compute_sample_id(s.image_id, s.subtype, s.label, s.question);
    s.generator_metadata = meta;
    return s;
  };

  PremiseOutcome out;
  out.samples.push_back(make(Polarity::Positive));
  out.samples.push_back(make(Polarity::Negative));
  if (options_.with_answers) {
    for (auto& s : out.samples) {
      try {
        s.reference_answer = generate_reference_answer(s, caption.caption);
      } catch (const std::exception& e) {
        ++out.answer_failures;
        spdlog::warn("reference answer for {} failed: {}", s.sample_id, e.what());
      }
    }
  }
  return out;
}

PipelineReport PremisePipeline::run(std::span<const ImageEntry> manifest, const Quotas& quotas,
                                    SampleSink& sink) const {
  if (manifest.empty()) throw PreconditionError("run_pipeline: empty manifest");
  PipelineReport report;
  std::map<PremiseSubtype, std::size_t> remaining;
  for (auto s : all_subtypes()) {
    auto it = quotas.find(s);
    remaining[s] = it == quotas.end() ? 0 : it->second;
    report.per_subtype[s];
  }
  auto unfilled = [&] {
    return std::any_of(remaining.begin(), remaining.end(), [](const auto& kv) { return kv.second > 0; });
  };

  const auto subtypes = all_subtypes();
  for (std::size_t img = 0; img < manifest.size() && unfilled(); ++img) {
    const ImageEntry& image = manifest[img];
    if (!is_resolvable(image.location)) {
      report.unresolvable_images.push_back(image.image_id);
      spdlog::warn("skipping unresolvable image {} ({})", image.image_id, image.location);
      continue;
    }
    ++report.images_scanned;

    std::vector<PremiseSubtype> candidates;
    for (std::size_t k = 0; k < subtypes.size(); ++k) {
      const auto s = subtypes[(img + k) % subtypes.size()];
      if (remaining[s] > 0) candidates.push_back(s);
      if (candidates.size() >= options_.max_attempts_per_image) break;
    }

    auto extracted = parallel_map(candidates.size(), options_.concurrency, [&](std::size_t i) {
      return extract_premise(image, candidates[i]);
    });

    std::vector<PremiseRecord> found;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      auto& counts = report.per_subtype[candidates[i]];
      ++counts.attempted;
      if (!extracted[i].ok()) {
        ++counts.errored;
        report.errors.push_back({image.image_id, candidates[i], "extract", describe(extracted[i].error)});
      } else if (extracted[i].value->status == PremiseStatus::Absent) {
        ++counts.absent;
      } else {
        found.push_back(std::move(*extracted[i].value));
      }
    }

    auto built = parallel_map(found.size(), options_.concurrency,
                              [&](std::size_t i) { return build_samples(image, found[i]); });

    for (std::size_t i = 0; i < found.size(); ++i) {
      auto& counts = report.per_subtype[found[i].subtype];
      if (!built[i].ok()) {
        ++counts.errored;
        report.errors.push_back({image.image_id, found[i].subtype, "generate", describe(built[i].error)});
        continue;
      }
      for (const auto& s : built[i].value->samples) {
        sink.write(s);
        ++report.samples_written;
      }
      ++counts.emitted;
      counts.answer_failures += built[i].value->answer_failures;
      --remaining[found[i].subtype];
    }
  }
  return report;
}

}  // namespace premise_forge
