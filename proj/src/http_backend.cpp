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

#include <httplib.h>

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "premise_forge/errors.hpp"
#include "premise_forge/hashing.hpp"
#include "premise_forge/model_client.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge {
namespace {

bool is_remote(std::string_view ref) {
  return text::istarts_with(ref, "http://") || text::istarts_with(ref, "https://") ||
         text::istarts_with(ref, "data:");
}

std::string mime_for(const std::filesystem::path& path) {
  const auto ext = text::fold_case(path.extension().string());
  if (ext == ".png") return "image/png";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "image/jpeg";
}

std::string image_url(const std::string& ref) {
  if (is_remote(ref)) return ref;
  std::ifstream in(ref, std::ios::binary);
  if (!in) throw PreconditionError("image file not readable: " + ref);
  std::ostringstream ss;
  ss << in.rdbuf();
  return "data:" + mime_for(ref) + ";base64," + base64_encode(ss.str());
}

// Transient failures are retried; everything else surfaces immediately.
struct Attempt {
  enum class Outcome { Ok, Transient, Fatal };
  Outcome outcome = Outcome::Ok;
  ChatResponse response;
  std::exception_ptr error;
};

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.base_url.empty()) throw ConfigError("http backend needs an endpoint URL");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

nlohmann::json HttpBackend::build_payload(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    nlohmann::json msg;
    msg["role"] = to_string(m.role);
    const bool text_only = m.parts.size() == 1 && m.parts[0].kind == ContentPart::Kind::Text;
    if (text_only) {
      msg["content"] = m.parts[0].value;
    } else {
      nlohmann::json parts = nlohmann::json::array();
      for (const auto& p : m.parts) {
        if (p.kind == ContentPart::Kind::Text) {
          parts.push_back({{"type", "text"}, {"text", p.value}});
        } else {
          parts.push_back({{"type", "image_url"}, {"image_url", {{"url", image_url(p.value)}}}});
        }
      }
      msg["content"] = std::move(parts);
    }
    messages.push_back(std::move(msg));
  }
  nlohmann::json body;
  body["model"] = request.model_name;
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body;
}

ChatResponse HttpBackend::parse_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  try {
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    ChatResponse r;
    if (content.is_string()) {
      r.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.value("type", "") == "text") r.text += part.at("text").get<std::string>();
      }
    } else {
      throw ProtocolError("message.content is neither a string nor an array");
    }
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      r.finish_reason = choice["finish_reason"].get<std::string>();
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      r.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
      r.usage.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed chat-completions response: ") + e.what());
  }
}

ChatResponse HttpBackend::complete(const ChatRequest& request) const {
  request.validate();
  const std::string payload = build_payload(request).dump(-1, ' ', false,
                                                          nlohmann::json::error_handler_t::replace);
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthError("environment variable " + config_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto attempt_once = [&]() -> Attempt {
    Attempt a;
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(config_.path, headers, payload, "application/json");
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    if (!res) {
      a.outcome = Attempt::Outcome::Transient;
      a.error = std::make_exception_ptr(
          TransportError("request to " + config_.base_url + config_.path +
                         " failed: " + httplib::to_string(res.error())));
      return a;
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      a.outcome = Attempt::Outcome::Fatal;
      a.error = std::make_exception_ptr(AuthError("credentials rejected (HTTP " +
                                                  std::to_string(status) + ")"));
      return a;
    }
    if (status == 408 || status == 429 || status >= 500) {
      a.outcome = Attempt::Outcome::Transient;
      a.error = std::make_exception_ptr(TransportError("HTTP " + std::to_string(status)));
      return a;
    }
    if (status < 200 || status >= 300) {
      a.outcome = Attempt::Outcome::Fatal;
      a.error = std::make_exception_ptr(
          ProtocolError("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200)));
      return a;
    }
    try {
      a.response = parse_response(res->body);
      a.response.latency_ms = elapsed.count();
    } catch (...) {
      a.outcome = Attempt::Outcome::Fatal;
      a.error = std::current_exception();
    }
    return a;
  };

  for (int retry = 0;; ++retry) {
    Attempt a = attempt_once();
    if (a.outcome == Attempt::Outcome::Ok) return a.response;
    if (a.outcome == Attempt::Outcome::Fatal || retry >= config_.retry.max_retries) {
      std::rethrow_exception(a.error);
    }
    const auto wait = config_.retry.delay(retry);
    spdlog::warn("transient failure talking to {} (retry {}/{} in {} ms)", config_.base_url,
                 retry + 1, config_.retry.max_retries, wait.count());
    sleeper_(wait);
  }
}

}  // namespace premise_forge
