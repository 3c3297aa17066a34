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

#include <sstream>

#include "premise_forge/cli.hpp"
#include "premise_forge/config.hpp"
#include "premise_forge/errors.hpp"
#include "support/helpers.hpp"

using namespace premise_forge;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
  nlohmann::json summary;
};

RunResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  auto text = r.out;
  while (!text.empty() && text.back() == '\n') text.pop_back();
  const auto last = text.substr(text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1);
  r.summary = nlohmann::json::parse(last);
  return r;
}

std::string demo(const char* name) { return std::string(PF_DEMO_DIR) + "/" + name; }

}  // namespace

TEST_CASE("config rejects inline secrets and bad values") {
  const std::filesystem::path base = ".";
  CHECK_THROWS_AS(AppConfig::from_json({{"backends", {{"judge", {{"kind", "http"}, {"endpoint", "http://x"},
                                                                 {"api_key", "sk-123"}}}}}},
                                       base),
                  ConfigError);
  CHECK_THROWS_AS(AppConfig::from_json({{"concurrency", 0}}, base).validate(), ConfigError);
  CHECK_THROWS_AS(AppConfig::from_json({{"reward_weights", {0, 0, 0}}}, base).validate(), ConfigError);
  const auto c = AppConfig::from_json({{"quotas", {{"scene", 3}}}, {"split", {{"seed", 5}}}}, base);
  CHECK(c.quotas.at(PremiseSubtype::Scene) == 3);
  CHECK(c.split_seed == 5);
  CHECK_THROWS_AS(AppConfig::from_json({{"quotas", {{"not_a_subtype", 3}}}}, base), ConfigError);
}

TEST_CASE("cli: score on the demo data") {
  testing::TempDir dir;
  const auto r = run_cli({"score", "--predictions", demo("predictions.jsonl"), "--dataset", demo("dataset.jsonl"),
                          "--out", (dir / "report.json").string(), "--resamples", "100"});
  CHECK(r.code == 0);
  CHECK(r.summary.at("command") == "score");
  CHECK(r.summary.at("status") == "ok");
  const auto report = nlohmann::json::parse(testing::read_file(dir / "report.json"));
  CHECK(report.is_object());
}

TEST_CASE("cli: validation failures exit 1 with a JSON summary") {
  auto r = run_cli({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.summary.at("exit_code") == 1);
  CHECK(r.err.find("frobnicate") != std::string::npos);

  r = run_cli({"generate", "--manifest", "/no/such/manifest.tsv", "--out", "/tmp/x.jsonl"});
  CHECK(r.code == 1);
  CHECK(r.summary.at("error").get<std::string>().find("/no/such/manifest.tsv") != std::string::npos);

  r = run_cli({"grpo-check", "--groups", demo("groups.json"), "--beta", "-1"});
  CHECK(r.code == 1);
}

TEST_CASE("cli: grpo-check reports the worked example") {
  const auto r = run_cli({"grpo-check", "--groups", demo("groups.json"), "--beta", "2"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  const auto first = nlohmann::json::parse(line);
  CHECK(first.at("objective").get<double>() == doctest::Approx(-1.7876).epsilon(1e-3));
}
