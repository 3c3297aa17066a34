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

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "premise_forge/dataset.hpp"
#include "premise_forge/model_client.hpp"
#include "premise_forge/pipeline.hpp"
#include "premise_forge/rewards.hpp"

namespace premise_forge {

/// Where one model role is served from.
struct BackendSpec {
  enum class Kind { Http, Mock };
  Kind kind = Kind::Mock;
  std::string model;
  // http
  std::string endpoint;
  std::string path = "/v1/chat/completions";
  std::string api_key_env;
  int timeout_s = 120;
  int max_retries = 3;
  int backoff_ms = 1000;
  // mock
  std::filesystem::path fixtures;
  std::optional<int> max_tokens;
};

/// The shared configuration file. Keys (all optional):
///
///   backends.{extractor,question,answer,judge,candidate}: BackendSpec objects
///     {"kind": "http", "endpoint", "path", "model", "api_key_env",
///      "timeout_s", "max_retries", "backoff_ms", "max_tokens"} or
///     {"kind": "mock", "fixtures": "file.json", "model"}
///   prompts_dir, image_manifest, concurrency,
///   temperatures.{generation,evaluation,judge},
///   reward_weights: [format, answer, reasoning],
///   bootstrap.{resamples,seed}, quotas.{<subtype>: n},
///   pipeline.{caption_overlap_threshold, caption_max_chars,
///             max_attempts_per_image, caption_attempts, corruption_attempts},
///   split.{fractions: [eval, sft, rl], seed},
///   evaluation.{template, deny_list, fallback_parsing, timeout_s}
///
/// Relative paths resolve against the file's directory. Secrets are never
/// read from the file: an `api_key` field is rejected.
struct AppConfig {
  std::map<std::string, BackendSpec, std::less<>> backends;
  std::optional<std::filesystem::path> prompts_dir;
  std::optional<std::filesystem::path> image_manifest;
  unsigned concurrency = 8;
  double temperature_generation = 0.7;
  double temperature_evaluation = 0.0;
  double temperature_judge = 0.0;
  rewards::RewardWeights reward_weights;
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t bootstrap_seed = 0;
  Quotas quotas;
  PipelineOptions pipeline;
  dataset::SplitFractions split_fractions;
  std::uint64_t split_seed = 0;
  std::string evaluation_template = "evaluate";
  std::vector<std::string> deny_list;
  bool fallback_parsing = true;
  int evaluation_timeout_s = 120;

  AppConfig();

  static AppConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& path);

  /// Merges the backends (and any other keys present) of a role-specific
  /// file such as --model-config. A file whose top level has "kind" is a
  /// bare BackendSpec for `role`.
  void merge_backend_file(const std::filesystem::path& path, const std::string& role);

  /// Throws ConfigError on concurrency < 1, negative temperatures, bad weights.
  void validate() const;

  const BackendSpec& backend(std::string_view role) const;
  bool has_backend(std::string_view role) const;

  TemplateStore templates() const;
};

BackendSpec parse_backend_spec(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Instantiates the backend. `timeout_override` replaces the configured timeout.
BackendPtr make_backend(const BackendSpec& spec, std::optional<int> timeout_override = std::nullopt);

}  // namespace premise_forge
