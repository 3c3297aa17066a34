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

#include "premise_forge/model_client.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "embedded_prompts.hpp"
#include "premise_forge/errors.hpp"
#include "premise_forge/hashing.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge {
namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_section(const std::vector<std::string_view>& lines) {
  std::size_t first = 0;
  std::size_t last = lines.size();
  while (first < last && text::trim(lines[first]).empty()) ++first;
  while (last > first && text::trim(lines[last - 1]).empty()) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out.push_back('\n');
    out.append(lines[i]);
  }
  return out;
}

MockFixture::Failure parse_failure(const std::string& s) {
  if (s == "transport") return MockFixture::Failure::Transport;
  if (s == "timeout") return MockFixture::Failure::Timeout;
  if (s == "protocol") return MockFixture::Failure::Protocol;
  if (s == "auth") return MockFixture::Failure::Auth;
  throw ConfigError("unknown mock failure kind '" + s + "'");
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "";
}

std::string ChatMessage::text() const {
  std::string out;
  for (const auto& p : parts) {
    if (p.kind == ContentPart::Kind::Text) out += p.value;
  }
  return out;
}

void ChatRequest::validate() const {
  bool has_user = false;
  for (const auto& m : messages) has_user = has_user || m.role == Role::User;
  if (!has_user) throw PreconditionError("chat request has no user message");
  if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
  if (max_tokens <= 0) throw PreconditionError("max_tokens must be positive");
}

ChatResponse complete(const ChatBackend& backend, const ChatRequest& request) {
  request.validate();
  return backend.complete(request);
}

// Templates --------------------------------------------------------------------

std::string PromptTemplate::version() const {
  std::string buf = system_text + '\x1e' + user_text;
  for (const auto& ex : few_shot_examples) buf += '\x1e' + ex.user + '\x1f' + ex.assistant;
  return sha256_hex(buf).substr(0, 12);
}

std::string substitute(std::string_view src, const Bindings& bindings) {
  std::string out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const char c = src[i];
    if ((c == '{' || c == '}') && i + 1 < src.size() && src[i + 1] == c) {
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '{') {
      std::size_t j = i + 1;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      if (j > i + 1 && j < src.size() && src[j] == '}') {
        const auto name = src.substr(i + 1, j - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw UnboundPlaceholder(std::string(name));
        out += it->second;
        i = j;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

ChatRequest render(const PromptTemplate& tmpl, const Bindings& bindings,
                   const std::vector<std::string>& images) {
  ChatRequest req;
  if (!tmpl.system_text.empty()) {
    req.messages.push_back({Role::System, {ContentPart::text(substitute(tmpl.system_text, bindings))}});
  }
  for (const auto& ex : tmpl.few_shot_examples) {
    req.messages.push_back({Role::User, {ContentPart::text(ex.user)}});
    req.messages.push_back({Role::Assistant, {ContentPart::text(ex.assistant)}});
  }
  ChatMessage user{Role::User, {ContentPart::text(substitute(tmpl.user_text, bindings))}};
  for (const auto& img : images) user.parts.push_back(ContentPart::image(img));
  req.messages.push_back(std::move(user));
  return req;
}

PromptTemplate parse_template(std::string key, std::string_view source) {
  enum class Section { Preamble, System, ExampleUser, ExampleAssistant, User };
  PromptTemplate tmpl;
  tmpl.key = std::move(key);

  Section current = Section::Preamble;
  std::vector<std::string_view> body;
  bool saw_user = false;
  std::optional<std::string> pending_example_user;

  auto flush = [&]() {
    std::string content = join_section(body);
    body.clear();
    switch (current) {
      case Section::Preamble:
        break;
      case Section::System:
        tmpl.system_text = std::move(content);
        break;
      case Section::ExampleUser:
        if (pending_example_user) {
          throw ConfigError("template '" + tmpl.key + "': example user without assistant reply");
        }
        pending_example_user = std::move(content);
        break;
      case Section::ExampleAssistant:
        if (!pending_example_user) {
          throw ConfigError("template '" + tmpl.key + "': example assistant without user turn");
        }
        tmpl.few_shot_examples.push_back({std::move(*pending_example_user), std::move(content)});
        pending_example_user.reset();
        break;
      case Section::User:
        tmpl.user_text = std::move(content);
        break;
    }
  };

  for (auto line : text::split_lines(source)) {
    const auto t = text::trim(line);
    std::optional<Section> next;
    if (t == "### system") next = Section::System;
    else if (t == "### example user") next = Section::ExampleUser;
    else if (t == "### example assistant") next = Section::ExampleAssistant;
    else if (t == "### user") next = Section::User;
    if (next) {
      flush();
      current = *next;
      saw_user = saw_user || *next == Section::User;
      continue;
    }
    if (current == Section::Preamble) continue;
    body.push_back(line);
  }
  flush();
  if (pending_example_user) {
    throw ConfigError("template '" + tmpl.key + "': example user without assistant reply");
  }
  if (!saw_user || tmpl.user_text.empty()) {
    throw ConfigError("template '" + tmpl.key + "' has no user section");
  }
  return tmpl;
}

TemplateStore TemplateStore::builtin() {
  TemplateStore store;
  for (const auto& p : detail::embedded_prompts()) {
    store.put(parse_template(std::string(p.key), p.source));
  }
  return store;
}

TemplateStore TemplateStore::load_directory(const std::filesystem::path& dir) {
  TemplateStore store;
  store.overlay_directory(dir);
  return store;
}

void TemplateStore::overlay_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("prompt directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) put(parse_template(f.stem().string(), read_file(f)));
}

void TemplateStore::put(PromptTemplate tmpl) {
  auto key = tmpl.key;
  templates_.insert_or_assign(std::move(key), std::move(tmpl));
}

const PromptTemplate& TemplateStore::get(std::string_view key) const {
  auto it = templates_.find(key);
  if (it == templates_.end()) throw ConfigError("no prompt template named '" + std::string(key) + "'");
  return it->second;
}

bool TemplateStore::contains(std::string_view key) const { return templates_.find(key) != templates_.end(); }

std::vector<std::string> TemplateStore::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : templates_) out.push_back(k);
  return out;
}

// Mock backend -------------------------------------------------------------------

MockBackend::MockBackend(std::map<std::string, MockFixture, std::less<>> fixtures)
    : fixtures_(std::move(fixtures)) {}

std::shared_ptr<MockBackend> MockBackend::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("mock fixtures must be a JSON object");
  std::map<std::string, MockFixture, std::less<>> fixtures;
  for (const auto& [key, value] : j.items()) {
    MockFixture f;
    if (value.is_string()) {
      f.text = value.get<std::string>();
    } else if (value.is_object()) {
      if (value.contains("error")) {
        f.failure = parse_failure(value.at("error").get<std::string>());
        f.text = value.value("message", "");
      } else {
        f.text = value.at("text").get<std::string>();
        f.finish_reason = value.value("finish_reason", "stop");
      }
    } else {
      throw ConfigError("mock fixture '" + key + "' must be a string or an object");
    }
    fixtures.emplace(key, std::move(f));
  }
  return std::make_shared<MockBackend>(std::move(fixtures));
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid mock fixture file " + path.string() + ": " + e.what());
  }
}

const MockFixture* MockBackend::resolve(std::string_view key) const {
  if (auto it = fixtures_.find(key); it != fixtures_.end()) return &it->second;
  if (auto hash = key.rfind('#'); hash != std::string_view::npos) {
    if (auto it = fixtures_.find(key.substr(0, hash)); it != fixtures_.end()) return &it->second;
  }
  if (auto colon = key.find(':'); colon != std::string_view::npos) {
    const std::string wildcard = std::string(key.substr(0, colon)) + ":*";
    if (auto it = fixtures_.find(wildcard); it != fixtures_.end()) return &it->second;
  }
  return nullptr;
}

ChatResponse MockBackend::complete(const ChatRequest& request) const {
  const MockFixture* f = resolve(request.fixture_key);
  if (f == nullptr) throw ProtocolError("mock backend: no fixture for key '" + request.fixture_key + "'");
  switch (f->failure) {
    case MockFixture::Failure::None:
      break;
    case MockFixture::Failure::Transport:
      throw TransportError("mock transport failure for '" + request.fixture_key + "'");
    case MockFixture::Failure::Timeout:
      throw TransportError("mock timeout for '" + request.fixture_key + "'");
    case MockFixture::Failure::Protocol:
      throw ProtocolError("mock protocol failure for '" + request.fixture_key + "'");
    case MockFixture::Failure::Auth:
      throw AuthError("mock credential rejection for '" + request.fixture_key + "'");
  }
  ChatResponse r;
  r.text = f->text;
  r.finish_reason = f->finish_reason;
  for (const auto& m : request.messages) {
    r.usage.prompt_tokens += static_cast<std::int64_t>(text::count_words(m.text()));
  }
  r.usage.completion_tokens = static_cast<std::int64_t>(text::count_words(f->text));
  return r;
}

std::chrono::milliseconds RetryPolicy::delay(int retry) const {
  return base_backoff * (std::int64_t{1} << retry);
}

}  // namespace premise_forge
