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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace premise_forge {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role) noexcept;

/// Text, or an image given as a local file path or a URL.
struct ContentPart {
  enum class Kind { Text, Image };
  Kind kind = Kind::Text;
  std::string value;

  static ContentPart text(std::string s) { return {Kind::Text, std::move(s)}; }
  static ContentPart image(std::string ref) { return {Kind::Image, std::move(ref)}; }
  bool operator==(const ContentPart&) const = default;
};

struct ChatMessage {
  Role role = Role::User;
  std::vector<ContentPart> parts;

  /// Concatenation of the text parts.
  std::string text() const;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string model_name;
  /// Semantic key (stage:image_id:subtype[#attempt]) that the mock backend
  /// resolves fixtures by. Not sent over the wire.
  std::string fixture_key;

  /// At least one user message, temperature >= 0, max_tokens > 0.
  void validate() const;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct ChatResponse {
  std::string text;  // verbatim assistant message
  std::string finish_reason;
  Usage usage;
  std::int64_t latency_ms = 0;
};

/// A chat-completions backend. Implementations must tolerate concurrent calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) const = 0;
  virtual std::string name() const = 0;
};

using BackendPtr = std::shared_ptr<const ChatBackend>;

// Prompt templates ------------------------------------------------------------

struct FewShotExample {
  std::string user;
  std::string assistant;
  bool operator==(const FewShotExample&) const = default;
};

/// System text and user text may contain `{name}` placeholders; `{{` and `}}`
/// are literal braces. Few-shot examples are sent verbatim.
struct PromptTemplate {
  std::string key;
  std::string system_text;
  std::string user_text;
  std::vector<FewShotExample> few_shot_examples;

  /// First 12 hex characters of a hash over the template content.
  std::string version() const;
  bool operator==(const PromptTemplate&) const = default;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes `{name}` placeholders. Throws UnboundPlaceholder.
std::string substitute(std::string_view text, const Bindings& bindings);

/// [system] + alternating few-shot user/assistant messages + the final user
/// message, which carries `images` after its text. Throws UnboundPlaceholder.
ChatRequest render(const PromptTemplate& tmpl, const Bindings& bindings,
                   const std::vector<std::string>& images = {});

/// Parses the sentinel-delimited prompt file format:
///
///   # free-form comment lines before the first sentinel
///   ### system
///   ...
///   ### example user
///   ...
///   ### example assistant
///   ...
///   ### user
///   ...
///
/// Example sections must come in user/assistant pairs. Section bodies are
/// trimmed of leading and trailing blank lines.
PromptTemplate parse_template(std::string key, std::string_view source);

class TemplateStore {
 public:
  /// Templates compiled into the binary from the repository's prompts/ directory.
  static TemplateStore builtin();
  /// Every *.txt file in `dir`, keyed by file stem.
  static TemplateStore load_directory(const std::filesystem::path& dir);

  /// Adds or replaces templates from `dir`.
  void overlay_directory(const std::filesystem::path& dir);
  void put(PromptTemplate tmpl);

  /// Throws ConfigError for an unknown key.
  const PromptTemplate& get(std::string_view key) const;
  bool contains(std::string_view key) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// Backends -----------------------------------------------------------------

struct MockFixture {
  enum class Failure { None, Transport, Timeout, Protocol, Auth };
  std::string text;
  std::string finish_reason = "stop";
  Failure failure = Failure::None;
};

/// Deterministic scripted backend. A request's fixture key is resolved by,
/// in order: exact match; the key with any `#attempt` suffix removed; the
/// stage wildcard `stage:*`. An unresolved key is a ProtocolError.
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(std::map<std::string, MockFixture, std::less<>> fixtures);

  /// A JSON object mapping keys to either a response string or an object
  /// {"text", "finish_reason"} / {"error": "transport"|"timeout"|"protocol"|"auth"}.
  static std::shared_ptr<MockBackend> from_json(const nlohmann::json& fixtures);
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);

  ChatResponse complete(const ChatRequest& request) const override;
  std::string name() const override { return "mock"; }

  const MockFixture* resolve(std::string_view key) const;

 private:
  std::map<std::string, MockFixture, std::less<>> fixtures_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_backoff{1000};

  /// Delay before retry number `retry` (0-based): base * 2^retry.
  std::chrono::milliseconds delay(int retry) const;
};

struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string api_key_env;  // name of the variable holding the bearer token
  std::chrono::seconds timeout{120};
  RetryPolicy retry;
};

/// OpenAI-style chat-completions over HTTP(S). Each call opens its own
/// connection, so one instance can serve concurrent callers.
class HttpBackend final : public ChatBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {});

  ChatResponse complete(const ChatRequest& request) const override;
  std::string name() const override { return "http:" + config_.base_url; }

  /// Request body for `request`. Local image files are read and inlined as
  /// base64 data URLs; URLs pass through.
  static nlohmann::json build_payload(const ChatRequest& request);
  /// Throws ProtocolError when the body lacks choices[0].message.content.
  static ChatResponse parse_response(const std::string& body);

 private:
  HttpBackendConfig config_;
  Sleeper sleeper_;
};

/// Sends `request`; thin wrapper that validates before dispatch.
ChatResponse complete(const ChatBackend& backend, const ChatRequest& request);

}  // namespace premise_forge
