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
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "premise_forge/errors.hpp"
#include "premise_forge/model_client.hpp"
#include "support/helpers.hpp"

using namespace premise_forge;

namespace {

/// A loopback chat-completions server answering from a scripted status list.
class FakeServer {
 public:
  explicit FakeServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto n = calls_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      const int status = n < statuses_.size() ? statuses_[n] : 200;
      res.status = status;
      if (status == 200) {
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"<answer>VALID ok</answer>"},)"
                        R"("finish_reason":"stop"}],"usage":{"prompt_tokens":7,"completion_tokens":3}})",
                        "application/json");
      } else {
        res.set_content("{\"error\":\"scripted\"}", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t calls() const { return calls_; }
  const std::string& last_body() const { return last_body_; }
  const std::string& last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::vector<int> statuses_;
  std::atomic<std::size_t> calls_{0};
  std::string last_body_;
  std::string last_auth_;
  int port_ = 0;
  std::thread thread_;
};

ChatRequest simple_request() {
  ChatRequest r;
  r.model_name = "m";
  r.messages.push_back({Role::User, {ContentPart::text("hi")}});
  return r;
}

}  // namespace

TEST_CASE("substitute and render") {
  CHECK(substitute("a {x} b {{y}}", {{"x", "1"}}) == "a 1 b {y}");
  CHECK_THROWS_AS(substitute("{premise}", {}), UnboundPlaceholder);
  try {
    substitute("see {premise}", {{"other", "v"}});
  } catch (const UnboundPlaceholder& e) {
    CHECK(std::string(e.what()).find("premise") != std::string::npos);
  }

  PromptTemplate t;
  t.system_text = "sys {name}";
  t.user_text = "user {name}";
  t.few_shot_examples = {{"u1", "a1"}, {"u2", "a2 {not_bound}"}};
  const auto req = render(t, {{"name", "N"}}, {"img.png"});
  REQUIRE(req.messages.size() == 6);
  CHECK(req.messages[0].role == Role::System);
  CHECK(req.messages[0].text() == "sys N");
  CHECK(req.messages[4].text() == "a2 {not_bound}");
  CHECK(req.messages[5].role == Role::User);
  REQUIRE(req.messages[5].parts.size() == 2);
  CHECK(req.messages[5].parts[1] == ContentPart::image("img.png"));
  CHECK_THROWS_AS(render(t, {}), UnboundPlaceholder);
}

TEST_CASE("parse_template sections") {
  const auto t = parse_template("k",
                                "# comment\n### system\n\nYou help.\n\n### example user\nQ1\n"
                                "### example assistant\nA1\n### user\nAsk {x}\n");
  CHECK(t.system_text == "You help.");
  CHECK(t.few_shot_examples == std::vector<FewShotExample>{{"Q1", "A1"}});
  CHECK(t.user_text == "Ask {x}");
  CHECK(t.version().size() == 12);
  CHECK_THROWS(parse_template("k", "### system\ns\n### example user\nQ\n### user\nu\n"));
}

TEST_CASE("builtin templates cover every stage") {
  const auto store = TemplateStore::builtin();
  for (const char* key : {"caption", "corrupt", "question_positive", "question_negative", "answer_false_premise",
                          "answer_true_premise", "evaluate", "judge_reasoning"}) {
    CHECK(store.contains(key));
  }
  CHECK(store.keys().size() == 21);
  CHECK_THROWS_AS(store.get("nope"), ConfigError);
  CHECK(store.get("evaluate").user_text.find("{question}") != std::string::npos);
}

TEST_CASE("mock backend resolves keys in order") {
  auto mock = MockBackend::from_json({{"stage:*", "wild"},
                                      {"stage:a:b", "base"},
                                      {"stage:a:b#2", "second"},
                                      {"err:x", {{"error", "timeout"}}},
                                      {"err:auth", {{"error", "auth"}}},
                                      {"fin:x", {{"text", "cut"}, {"finish_reason", "length"}}}});
  CHECK(mock->resolve("stage:a:b")->text == "base");
  CHECK(mock->resolve("stage:a:b#2")->text == "second");
  CHECK(mock->resolve("stage:a:b#3")->text == "base");
  CHECK(mock->resolve("stage:zz:b")->text == "wild");
  CHECK(mock->resolve("other:a") == nullptr);

  auto req = simple_request();
  req.fixture_key = "fin:x";
  const auto r = complete(*mock, req);
  CHECK(r.text == "cut");
  CHECK(r.finish_reason == "length");
  req.fixture_key = "err:x";
  CHECK_THROWS_AS(complete(*mock, req), TransportError);
  req.fixture_key = "err:auth";
  CHECK_THROWS_AS(complete(*mock, req), AuthError);
  req.fixture_key = "missing:key";
  CHECK_THROWS_AS(complete(*mock, req), ProtocolError);
  CHECK_THROWS_AS(MockBackend::from_json({{"k", {{"error", "bogus"}}}}), ConfigError);
}

TEST_CASE("requests are validated before dispatch") {
  auto mock = MockBackend::from_json({{"k:*", "x"}});
  ChatRequest empty;
  CHECK_THROWS_AS(complete(*mock, empty), PreconditionError);
  auto hot = simple_request();
  hot.temperature = -0.1;
  CHECK_THROWS_AS(complete(*mock, hot), PreconditionError);
}

TEST_CASE("retry policy doubles the delay") {
  RetryPolicy p;
  CHECK(p.delay(0).count() == 1000);
  CHECK(p.delay(1).count() == 2000);
  CHECK(p.delay(2).count() == 4000);
}

TEST_CASE("http payload shape inlines local images") {
  testing::TempDir dir;
  testing::write_file(dir / "x.png", std::string("\x89PNG", 4));
  ChatRequest r = simple_request();
  r.messages.insert(r.messages.begin(), ChatMessage{Role::System, {ContentPart::text("sys")}});
  r.messages.back().parts.push_back(ContentPart::image((dir / "x.png").string()));
  r.messages.back().parts.push_back(ContentPart::image("https://example.org/a.jpg"));
  const auto j = HttpBackend::build_payload(r);
  CHECK(j.at("model") == "m");
  CHECK(j.at("messages")[0].at("content") == "sys");
  const auto& parts = j.at("messages")[1].at("content");
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].at("type") == "text");
  CHECK(parts[1].at("image_url").at("url") == "data:image/png;base64,iVBORw==");
  CHECK(parts[2].at("image_url").at("url") == "https://example.org/a.jpg");
  CHECK_THROWS_AS(HttpBackend::parse_response("{\"choices\":[]}"), ProtocolError);
  CHECK_THROWS_AS(HttpBackend::parse_response("not json"), ProtocolError);
}

TEST_CASE("http backend against a loopback server") {
  ::setenv("PF_TEST_TOKEN", "sekrit", 1);
  std::vector<long> slept;
  auto sleeper = [&](std::chrono::milliseconds d) { slept.push_back(d.count()); };

  SUBCASE("success carries bearer auth and usage") {
    FakeServer server({200});
    HttpBackend backend({server.url(), "/v1/chat/completions", "PF_TEST_TOKEN"}, sleeper);
    const auto r = backend.complete(simple_request());
    CHECK(r.text == "<answer>VALID ok</answer>");
    CHECK(r.finish_reason == "stop");
    CHECK(r.usage.prompt_tokens == 7);
    CHECK(server.last_auth() == "Bearer sekrit");
    const auto body = nlohmann::json::parse(server.last_body());
    CHECK(body.at("messages")[0].at("content") == "hi");
    CHECK(slept.empty());
  }
  SUBCASE("transient statuses retry with backoff") {
    FakeServer server({503, 429, 500});
    HttpBackend backend({server.url(), "/v1/chat/completions", "PF_TEST_TOKEN"}, sleeper);
    CHECK(backend.complete(simple_request()).text.size() > 0);
    CHECK(server.calls() == 4);
    CHECK(slept == std::vector<long>{1000, 2000, 4000});
  }
  SUBCASE("retries are bounded") {
    FakeServer server({503, 503, 503, 503, 503});
    HttpBackend backend({server.url(), "/v1/chat/completions", "PF_TEST_TOKEN"}, sleeper);
    CHECK_THROWS_AS(backend.complete(simple_request()), TransportError);
    CHECK(server.calls() == 4);
  }
  SUBCASE("401 is an auth failure and is not retried") {
    FakeServer server({401});
    HttpBackend backend({server.url(), "/v1/chat/completions", "PF_TEST_TOKEN"}, sleeper);
    CHECK_THROWS_AS(backend.complete(simple_request()), AuthError);
    CHECK(server.calls() == 1);
  }
  SUBCASE("400 is a protocol error") {
    FakeServer server({400});
    HttpBackend backend({server.url(), "/v1/chat/completions", ""}, sleeper);
    CHECK_THROWS_AS(backend.complete(simple_request()), ProtocolError);
  }
  SUBCASE("missing credential variable") {
    HttpBackend backend({"http://127.0.0.1:9", "/v1/chat/completions", "PF_TEST_TOKEN_UNSET"}, sleeper);
    CHECK_THROWS_AS(backend.complete(simple_request()), AuthError);
  }
  SUBCASE("unreachable endpoint") {
    HttpBackendConfig cfg{"http://127.0.0.1:1", "/v1/chat/completions", ""};
    cfg.timeout = std::chrono::seconds(2);
    HttpBackend backend(cfg, sleeper);
    CHECK_THROWS_AS(backend.complete(simple_request()), TransportError);
    CHECK(slept.size() == 3);
  }
}
