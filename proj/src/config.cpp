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

#include "premise_forge/config.hpp"

#include <fstream>
#include <sstream>

#include "premise_forge/errors.hpp"
#include "premise_forge/evaluator.hpp"

namespace premise_forge {
namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? (base / path).lexically_normal() : path;
}

void reject_secrets(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) return;
  for (const auto& [key, value] : j.items()) {
    if (key == "api_key" || key == "token" || key == "password") {
      throw ConfigError(where + "." + key +
                        ": secrets must come from the environment (use api_key_env)");
    }
    reject_secrets(value, where + "." + key);
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

BackendSpec parse_backend_spec(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("backend spec must be an object");
  BackendSpec spec;
  const auto kind = get_or<std::string>(j, "kind", "http");
  if (kind == "http") {
    spec.kind = BackendSpec::Kind::Http;
  } else if (kind == "mock") {
    spec.kind = BackendSpec::Kind::Mock;
  } else {
    throw ConfigError("backend kind must be 'http' or 'mock', got '" + kind + "'");
  }
  spec.model = get_or<std::string>(j, "model", "");
  spec.endpoint = get_or<std::string>(j, "endpoint", "");
  spec.path = get_or<std::string>(j, "path", spec.path);
  spec.api_key_env = get_or<std::string>(j, "api_key_env", "");
  spec.timeout_s = get_or<int>(j, "timeout_s", spec.timeout_s);
  spec.max_retries = get_or<int>(j, "max_retries", spec.max_retries);
  spec.backoff_ms = get_or<int>(j, "backoff_ms", spec.backoff_ms);
  if (j.contains("max_tokens")) spec.max_tokens = get_or<int>(j, "max_tokens", 0);
  if (j.contains("fixtures")) spec.fixtures = resolve(base_dir, get_or<std::string>(j, "fixtures", ""));
  if (spec.kind == BackendSpec::Kind::Http && spec.endpoint.empty()) {
    throw ConfigError("http backend needs an 'endpoint'");
  }
  if (spec.kind == BackendSpec::Kind::Mock && spec.fixtures.empty()) {
    throw ConfigError("mock backend needs a 'fixtures' file");
  }
  if (spec.timeout_s <= 0 || spec.max_retries < 0 || spec.backoff_ms < 0) {
    throw ConfigError("backend timeout must be positive and retry settings non-negative");
  }
  return spec;
}

AppConfig::AppConfig() : deny_list(default_deny_list()) {}

AppConfig AppConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_secrets(j, "config");
  AppConfig c;
  if (j.contains("backends")) {
    for (const auto& [role, spec] : j.at("backends").items()) {
      c.backends[role] = parse_backend_spec(spec, base_dir);
    }
  }
  if (j.contains("prompts_dir")) c.prompts_dir = resolve(base_dir, j.at("prompts_dir").get<std::string>());
  if (j.contains("image_manifest")) {
    c.image_manifest = resolve(base_dir, j.at("image_manifest").get<std::string>());
  }
  const int concurrency = get_or<int>(j, "concurrency", 8);
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  c.concurrency = static_cast<unsigned>(concurrency);

  const auto temps = get_or<nlohmann::json>(j, "temperatures", nlohmann::json::object());
  c.temperature_generation = get_or<double>(temps, "generation", c.temperature_generation);
  c.temperature_evaluation = get_or<double>(temps, "evaluation", c.temperature_evaluation);
  c.temperature_judge = get_or<double>(temps, "judge", c.temperature_judge);

  if (j.contains("reward_weights")) {
    const auto w = j.at("reward_weights").get<std::vector<double>>();
    if (w.size() != 3) throw ConfigError("reward_weights must have three entries");
    c.reward_weights = {w[0], w[1], w[2]};
  }

  const auto boot = get_or<nlohmann::json>(j, "bootstrap", nlohmann::json::object());
  c.bootstrap_resamples = get_or<std::size_t>(boot, "resamples", c.bootstrap_resamples);
  c.bootstrap_seed = get_or<std::uint64_t>(boot, "seed", c.bootstrap_seed);

  if (j.contains("quotas")) {
    for (const auto& [name, count] : j.at("quotas").items()) {
      auto subtype = parse_subtype(name);
      if (!subtype) throw ConfigError("quotas: unknown subtype '" + name + "'");
      const auto n = count.get<long long>();
      if (n < 0) throw ConfigError("quotas: negative count for '" + name + "'");
      c.quotas[*subtype] = static_cast<std::size_t>(n);
    }
  }

  const auto pipe = get_or<nlohmann::json>(j, "pipeline", nlohmann::json::object());
  c.pipeline.caption_overlap_threshold =
      get_or<double>(pipe, "caption_overlap_threshold", c.pipeline.caption_overlap_threshold);
  c.pipeline.caption_max_chars = get_or<std::size_t>(pipe, "caption_max_chars", c.pipeline.caption_max_chars);
  c.pipeline.max_attempts_per_image =
      get_or<std::size_t>(pipe, "max_attempts_per_image", c.pipeline.max_attempts_per_image);
  c.pipeline.caption_attempts = get_or<int>(pipe, "caption_attempts", c.pipeline.caption_attempts);
  c.pipeline.corruption_attempts = get_or<int>(pipe, "corruption_attempts", c.pipeline.corruption_attempts);
  c.pipeline.concurrency = c.concurrency;

  const auto split = get_or<nlohmann::json>(j, "split", nlohmann::json::object());
  if (split.contains("fractions")) {
    const auto f = split.at("fractions").get<std::vector<double>>();
    if (f.size() != 3) throw ConfigError("split.fractions must have three entries");
    c.split_fractions = {f[0], f[1], f[2]};
  }
  c.split_seed = get_or<std::uint64_t>(split, "seed", c.split_seed);

  const auto eval = get_or<nlohmann::json>(j, "evaluation", nlohmann::json::object());
  c.evaluation_template = get_or<std::string>(eval, "template", c.evaluation_template);
  c.deny_list = get_or<std::vector<std::string>>(eval, "deny_list", c.deny_list);
  c.fallback_parsing = get_or<bool>(eval, "fallback_parsing", c.fallback_parsing);
  c.evaluation_timeout_s = get_or<int>(eval, "timeout_s", c.evaluation_timeout_s);

  c.validate();
  return c;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  try {
    return from_json(read_json(path), path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid config " + path.string() + ": " + e.what());
  }
}

void AppConfig::merge_backend_file(const std::filesystem::path& path, const std::string& role) {
  const auto j = read_json(path);
  reject_secrets(j, path.filename().string());
  const auto base = path.parent_path();
  try {
    if (j.is_object() && j.contains("kind")) {
      backends[role] = parse_backend_spec(j, base);
      return;
    }
    const auto other = from_json(j, base);
    for (const auto& [name, spec] : other.backends) backends[name] = spec;
    if (j.contains("prompts_dir")) prompts_dir = other.prompts_dir;
    if (j.contains("image_manifest")) image_manifest = other.image_manifest;
    if (j.contains("evaluation")) {
      evaluation_template = other.evaluation_template;
      deny_list = other.deny_list;
      fallback_parsing = other.fallback_parsing;
      evaluation_timeout_s = other.evaluation_timeout_s;
    }
    if (j.contains("temperatures")) {
      temperature_evaluation = other.temperature_evaluation;
      temperature_judge = other.temperature_judge;
    }
    if (j.contains("reward_weights")) reward_weights = other.reward_weights;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid config " + path.string() + ": " + e.what());
  }
}

void AppConfig::validate() const {
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  for (double t : {temperature_generation, temperature_evaluation, temperature_judge}) {
    if (!(t >= 0.0)) throw ConfigError("temperatures must be >= 0");
  }
  try {
    reward_weights.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  if (fallback_parsing && deny_list.empty()) {
    throw ConfigError("evaluation.deny_list must be non-empty when fallback parsing is enabled");
  }
  if (pipeline.caption_overlap_threshold < 0.0 || pipeline.caption_overlap_threshold > 1.0) {
    throw ConfigError("pipeline.caption_overlap_threshold must lie in [0, 1]");
  }
}

const BackendSpec& AppConfig::backend(std::string_view role) const {
  auto it = backends.find(role);
  if (it == backends.end()) throw ConfigError("no backend configured for role '" + std::string(role) + "'");
  return it->second;
}

bool AppConfig::has_backend(std::string_view role) const { return backends.find(role) != backends.end(); }

TemplateStore AppConfig::templates() const {
  auto store = TemplateStore::builtin();
  if (prompts_dir) store.overlay_directory(*prompts_dir);
  return store;
}

BackendPtr make_backend(const BackendSpec& spec, std::optional<int> timeout_override) {
  if (spec.kind == BackendSpec::Kind::Mock) return MockBackend::from_file(spec.fixtures);
  HttpBackendConfig cfg;
  cfg.base_url = spec.endpoint;
  cfg.path = spec.path;
  cfg.api_key_env = spec.api_key_env;
  cfg.timeout = std::chrono::seconds(timeout_override.value_or(spec.timeout_s));
  cfg.retry.max_retries = spec.max_retries;
  cfg.retry.base_backoff = std::chrono::milliseconds(spec.backoff_ms);
  return std::make_shared<HttpBackend>(std::move(cfg));
}

}  // namespace premise_forge
