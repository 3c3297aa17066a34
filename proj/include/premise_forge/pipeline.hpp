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

#include <filesystem>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "premise_forge/model_client.hpp"
#include "premise_forge/records.hpp"
#include "premise_forge/taxonomy.hpp"

namespace premise_forge {

struct ImageEntry {
  std::string image_id;
  std::string location;  // local path or URL
};

/// Reads `image_id<TAB>path-or-url` lines. Blank lines and lines starting
/// with '#' are skipped; relative paths resolve against the manifest's
/// directory.
std::vector<ImageEntry> read_manifest(const std::filesystem::path& path);

enum class PremiseStatus { Found, Absent };

struct PremiseRecord {
  std::string image_id;
  PremiseSubtype subtype = PremiseSubtype::EntityExistence;
  std::string content;  // empty iff Absent
  PremiseStatus status = PremiseStatus::Absent;
};

struct CaptionRecord {
  std::string image_id;
  std::string premise;
  std::string caption;
};

enum class Polarity { Positive, Negative };

/// Model, sampling settings and backend for one pipeline role.
struct StageClient {
  BackendPtr backend;
  std::string model_name;
  double temperature = 0.7;
  int max_tokens = 512;
};

struct PipelineClients {
  StageClient extractor;  // vision model: extraction and captioning
  StageClient question;   // text model: corruption and question writing
  StageClient answer;     // reference answers; falls back to `question` when unset
};

struct PipelineOptions {
  double caption_overlap_threshold = 0.6;
  std::size_t caption_max_chars = 600;
  std::size_t max_attempts_per_image = kNumSubtypes;
  int caption_attempts = 2;
  int corruption_attempts = 3;
  unsigned concurrency = 8;
  bool with_answers = false;
};

using Quotas = std::map<PremiseSubtype, std::size_t>;

class SampleSink {
 public:
  virtual ~SampleSink() = default;
  virtual void write(const QuestionSample& sample) = 0;
};

/// Appends canonical JSONL lines to a file; throws Error on I/O failure.
class JsonlSampleSink final : public SampleSink {
 public:
  explicit JsonlSampleSink(const std::filesystem::path& path);
  ~JsonlSampleSink() override;
  void write(const QuestionSample& sample) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class VectorSampleSink final : public SampleSink {
 public:
  void write(const QuestionSample& sample) override { samples.push_back(sample); }
  std::vector<QuestionSample> samples;
};

struct SubtypeCounts {
  std::size_t attempted = 0;
  std::size_t absent = 0;
  std::size_t emitted = 0;  // accepted premises, each yielding two samples
  std::size_t errored = 0;
  std::size_t answer_failures = 0;
};

struct ItemError {
  std::string image_id;
  PremiseSubtype subtype = PremiseSubtype::EntityExistence;
  std::string stage;
  std::string message;
};

struct PipelineReport {
  std::map<PremiseSubtype, SubtypeCounts> per_subtype;
  std::vector<ItemError> errors;
  std::vector<std::string> unresolvable_images;
  std::size_t images_scanned = 0;
  std::size_t samples_written = 0;

  SubtypeCounts totals() const;
  nlohmann::ordered_json to_json() const;
};

/// The three-stage construction pipeline plus reference-answer generation.
///
/// Every model call carries a fixture key `<stage>:<image_id>:<subtype>`
/// (stages: extract, caption, corrupt, question_pos, question_neg,
/// answer_pos, answer_neg), suffixed `#<n>` on the n-th retry of a stage.
class PremisePipeline {
 public:
  PremisePipeline(PipelineClients clients, TemplateStore templates, PipelineOptions options = {});

  /// Absent when the model answers with the bare token NO.
  PremiseRecord extract_premise(const ImageEntry& image, PremiseSubtype subtype) const;

  /// Requires the caption to cover the premise's content words; one retry.
  CaptionRecord caption_with_premise(const ImageEntry& image, PremiseSubtype subtype,
                                     std::string_view premise) const;

  /// A premise that differs from `premise` after normalization.
  std::string corrupt_premise(const ImageEntry& image, PremiseSubtype subtype,
                              std::string_view premise) const;

  std::string generate_question(const ImageEntry& image, PremiseSubtype subtype,
                                std::string_view caption, std::string_view embedded_premise,
                                Polarity polarity) const;

  /// Training answer in <think>/<answer> form. For false-premise samples the
  /// answer must reject the premise; for true-premise samples it must answer.
  std::string generate_reference_answer(const QuestionSample& sample,
                                        std::string_view caption) const;

  /// Scans images in manifest order, trying subtypes round-robin (the start
  /// rotates by one per image) until every quota is met or the manifest is
  /// exhausted. Each accepted premise yields one positive and one negative
  /// sample. Per-item failures are recorded, not thrown.
  PipelineReport run(std::span<const ImageEntry> manifest, const Quotas& quotas,
                     SampleSink& sink) const;

  const PipelineOptions& options() const noexcept { return options_; }

 private:
  struct PremiseOutcome;
  PremiseOutcome build_samples(const ImageEntry& image, const PremiseRecord& premise) const;
  ChatResponse call(const StageClient& client, const std::string& template_key,
                    const Bindings& bindings, std::vector<std::string> images,
                    std::string fixture_key) const;
  const StageClient& answer_client() const;

  PipelineClients clients_;
  TemplateStore templates_;
  PipelineOptions options_;
};

/// Parses the NO sentinel or a premise out of an extraction reply. Throws
/// MalformedExtraction when nothing usable remains.
PremiseRecord parse_extraction(std::string_view image_id, PremiseSubtype subtype,
                               std::string_view response);

}  // namespace premise_forge
