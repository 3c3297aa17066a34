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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "premise_forge/dataset.hpp"
#include "premise_forge/evaluator.hpp"
#include "premise_forge/grpo.hpp"
#include "premise_forge/metrics.hpp"
#include "premise_forge/pipeline.hpp"
#include "premise_forge/rewards.hpp"
#include "premise_forge/text.hpp"

#include <spdlog/spdlog.h>
#include "support/classify_cases.hpp"
#include "support/generators.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace premise_forge;

namespace {

using Clock = std::chrono::steady_clock;

/// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string demo(const std::string& name) { return std::string(PF_DEMO_DIR) + "/" + name; }

constexpr auto FP = PremiseLabel::FalsePremise;
constexpr auto TP = PremiseLabel::TruePremise;

std::vector<PredictionRecord> preds(std::initializer_list<PremiseLabel> gold, std::initializer_list<Verdict> got) {
  std::vector<PredictionRecord> out;
  auto p = got.begin();
  std::size_t i = 0;
  for (auto g : gold) out.push_back({"id" + std::to_string(i++), g, *p++, "", PremiseSubtype::Scene});
  return out;
}

bool same(std::optional<double> a, std::optional<double> b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) < 1e-12;
}

void criterion_1(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_int_distribution<int> pick(0, 2);
  const Verdict verdicts[] = {Verdict::FalsePremise, Verdict::TruePremise, Verdict::Unparseable};
  for (int t = 0; t < 1000; ++t) {
    std::vector<PredictionRecord> ps;
    const int n = size(gen);
    for (int i = 0; i < n; ++i) {
      // Gold labels are drawn from the same three-way draw; Unparseable gold
      // is not a label, so that draw is folded onto the two real labels.
      const int g = pick(gen);
      ps.push_back({"s" + std::to_string(i), g == 1 ? TP : FP, verdicts[pick(gen)], "", PremiseSubtype::Scene});
    }
    const auto r = metrics::compute_metrics(ps);
    c.expect(same(r.fpc, oracle::metric(ps, oracle::Metric::FPC)), "FPC differs from oracle at set " + std::to_string(t));
    c.expect(same(r.fpdp, oracle::metric(ps, oracle::Metric::FPDP)), "FPDP differs at set " + std::to_string(t));
    c.expect(same(r.tpir, oracle::metric(ps, oracle::Metric::TPIR)), "TPIR differs at set " + std::to_string(t));
  }
  const double s = seconds_since(t0);
  c.expect(s < 5.0, "runtime " + std::to_string(s) + " s");
}

void criterion_2(Check& c) {
  using V = Verdict;
  auto r = metrics::compute_metrics(preds({FP, TP}, {V::FalsePremise, V::TruePremise}));
  c.expect(r.fpc == 1.0 && r.fpdp == 1.0 && r.tpir == 1.0, "all-correct case");
  r = metrics::compute_metrics(preds({FP, FP, TP, TP}, {V::FalsePremise, V::TruePremise, V::TruePremise, V::FalsePremise}));
  c.expect(r.fpc == 0.5 && r.fpdp == 0.5 && r.tpir == 0.5, "half-correct case");
  r = metrics::compute_metrics(preds({FP, TP, FP}, {V::FalsePremise, V::Unparseable, V::TruePremise}));
  c.expect(r.fpc == 1.0 / 3.0 && r.fpdp == 1.0 && r.tpir == 0.0, "unparseable case");
}

void criterion_3(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> size(2, 64);
  // Rewards and shifts live on a 2^-20 grid, so r + c is exact and the
  // exact-equality check is meaningful.
  std::uniform_int_distribution<std::int64_t> reward(0, 1 << 20);
  std::uniform_int_distribution<std::int64_t> shift(-(10 << 20), 10 << 20);
  const double unit = std::ldexp(1.0, -20);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> r(static_cast<std::size_t>(size(gen)));
    for (auto& x : r) x = static_cast<double>(reward(gen)) * unit;
    const auto a = grpo::group_advantages(r);
    double mean = 0.0;
    for (double x : r) mean += x;
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double x : r) var += (x - mean) * (x - mean);
    const bool above_guard = std::sqrt(var / static_cast<double>(r.size())) > 1e-8;
    if (above_guard) {
      const double am = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
      double ss = 0.0;
      for (double x : a) ss += (x - am) * (x - am);
      c.expect(std::abs(am) < 1e-9, "mean not zero at group " + std::to_string(t));
      c.expect(std::abs(std::sqrt(ss / static_cast<double>(a.size())) - 1.0) < 1e-6,
               "std not one at group " + std::to_string(t));
    }
    auto shifted = r;
    const double k = static_cast<double>(shift(gen)) * unit;
    for (auto& x : shifted) x += k;
    c.expect(grpo::group_advantages(shifted) == a, "shift changed advantages at group " + std::to_string(t));

    std::vector<double> flat(r.size(), r[0]);
    const auto z = grpo::group_advantages(flat);
    c.expect(std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; }),
             "zero-variance group not all zero at " + std::to_string(t));
  }
  const double s = seconds_since(t0);
  c.expect(s < 10.0, "runtime " + std::to_string(s) + " s");
}

grpo::CandidateGroup worked_example() {
  const double ln2 = std::log(2.0);
  grpo::CandidateGroup g;
  g.rewards = {0.0, 1.0};
  g.logp_current = {ln2, -ln2};
  g.logp_old = {0.0, 0.0};
  g.distributions = {{{0.5, 0.5}, {0.25, 0.75}}, {{0.5, 0.5}, {0.25, 0.75}}};
  return g;
}

void criterion_4(Check& c) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    grpo::CandidateGroup g;
    for (int i = 0; i < 8; ++i) {
      g.rewards.push_back(u(gen));
      g.logp_current.push_back(nd(gen));
    }
    g.logp_old = g.logp_current;
    c.expect(std::abs(grpo::aggregate_reward(g)) < 1e-9, "on-policy aggregate not zero");
  }
  const auto g = worked_example();
  const double j = grpo::grpo_objective(g, 2.0);
  c.expect(std::abs(j - (-1.7876)) < 1e-3, "worked example J = " + std::to_string(j));
  c.expect(grpo::kl_term(g).value_or(0.0) > 0.0, "worked example KL term not positive");
  double prev = grpo::grpo_objective(g, 0.0);
  for (double beta : {0.5, 1.0, 2.0}) {
    const double next = grpo::grpo_objective(g, beta);
    c.expect(next <= prev, "objective increased at beta " + std::to_string(beta));
    prev = next;
  }
}

std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t n, bool zeros) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution drop(0.25);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) sum += (x = zeros && drop(gen) ? 0.0 : e(gen));
  if (sum == 0.0) sum = v[0] = 1.0;
  for (auto& x : v) x /= sum;
  return v;
}

void criterion_5(Check& c) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> size(1, 16);
  std::bernoulli_distribution identical(0.2);
  for (int t = 0; t < 10000; ++t) {
    const auto n = static_cast<std::size_t>(size(gen));
    const auto q = random_simplex(gen, n, false);
    const auto p = identical(gen) ? q : random_simplex(gen, n, true);
    const double d = grpo::kl_divergence(p, q);
    c.expect(d >= 0.0, "negative KL at pair " + std::to_string(t));
    if (p == q) {
      c.expect(d < 1e-12, "KL(p, p) not zero at pair " + std::to_string(t));
    } else {
      c.expect(d >= 1e-12, "KL zero for p != q at pair " + std::to_string(t));
    }
  }
  std::normal_distribution<double> nd(-2.0, 3.0);
  for (int t = 0; t < 10000; ++t) {
    const auto n = static_cast<std::size_t>(size(gen));
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen);
    c.expect(grpo::kl_estimator_k3(a, b) >= 0.0, "negative k3 at array " + std::to_string(t));
  }
  const double kl = grpo::kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75});
  c.expect(std::abs(kl - 0.1438) < 1e-4, "KL example = " + std::to_string(kl));
  const double k3 = grpo::kl_estimator_k3(std::vector<double>{0.0}, std::vector<double>{std::log(2.0)});
  c.expect(std::abs(k3 - 0.3069) < 1e-4, "k3 example = " + std::to_string(k3));
}

std::string run_demo_pipeline(const std::filesystem::path& out) {
  auto fixtures = MockBackend::from_file(demo("fixtures.json"));
  PipelineClients clients;
  clients.extractor = {fixtures, "mock-vision"};
  clients.question = {fixtures, "mock-text"};
  PipelineOptions opt;
  opt.concurrency = 4;
  PremisePipeline pipeline(clients, TemplateStore::builtin(), opt);
  const auto manifest = read_manifest(demo("manifest.tsv"));
  Quotas quotas;
  for (auto s : all_subtypes()) quotas[s] = 1;
  {
    JsonlSampleSink sink(out);
    pipeline.run(manifest, quotas, sink);
  }
  return testing::read_file(out);
}

void criterion_6(Check& c) {
  const auto t0 = Clock::now();
  testing::TempDir dir;
  const auto manifest = read_manifest(demo("manifest.tsv"));
  c.expect(manifest.size() == 5, "demo manifest has " + std::to_string(manifest.size()) + " images");
  const auto first = run_demo_pipeline(dir / "a.jsonl");
  const auto second = run_demo_pipeline(dir / "b.jsonl");
  c.expect(first == second, "two runs differ");
  const auto samples = dataset::load(dir / "a.jsonl");
  c.expect(!samples.empty(), "pipeline produced no samples");
  std::size_t pos = 0, neg = 0;
  for (const auto& s : samples) {
    if (s.label == FP) {
      ++neg;
      c.expect(text::normalize_premise(s.embedded_premise) != text::normalize_premise(s.original_premise),
               "false-premise sample " + s.sample_id + " embeds its original premise");
    } else {
      ++pos;
    }
  }
  c.expect(pos == neg, "positive " + std::to_string(pos) + " vs negative " + std::to_string(neg));
  const double s = seconds_since(t0);
  c.expect(s < 5.0, "runtime " + std::to_string(s) + " s");
}

void criterion_7(Check& c) {
  using rewards::Completion;
  c.expect(rewards::format_reward(Completion("<think>x</think><answer>false premise</answer>")) == 1.0, "format 1");
  c.expect(rewards::format_reward(Completion("<answer>y</answer><think>x</think>")) == 0.0, "format order");
  c.expect(rewards::format_reward(Completion("<think>x</think><answer></answer>")) == 0.0, "format empty");
  c.expect(rewards::answer_reward(Completion("<answer>FALSE_PREMISE: the sign means stop, not yield</answer>"), FP) ==
               1.0,
           "answer match");
  c.expect(rewards::answer_reward(Completion("<answer>VALID \xe2\x80\x94 it is red.</answer>"), FP) == 0.0,
           "answer mismatch");
  c.expect(rewards::answer_reward(Completion("no blocks"), FP) == 0.0 &&
               rewards::answer_reward(Completion("no blocks"), TP) == 0.0,
           "answer unparseable");
  c.expect(std::abs(rewards::combine(1.0, 1.0, 0.6, {1.0, 2.0, 1.0}) - 0.9) < 1e-12, "weighted total 0.9");
  for (const rewards::RewardWeights& w : {rewards::RewardWeights{1, 1, 1}, rewards::RewardWeights{1, 2, 1},
                                          rewards::RewardWeights{0, 3, 0.5}}) {
    for (int f = 0; f < 10; ++f) {
      for (int a = 0; a < 10; ++a) {
        for (int r = 0; r < 10; ++r) {
          const double t = rewards::combine(f / 9.0, a / 9.0, r / 9.0, w);
          c.expect(t >= 0.0 && t <= 1.0, "total outside [0, 1]");
          if (f < 9) c.expect(rewards::combine((f + 1) / 9.0, a / 9.0, r / 9.0, w) >= t, "not monotone in format");
          if (a < 9) c.expect(rewards::combine(f / 9.0, (a + 1) / 9.0, r / 9.0, w) >= t, "not monotone in answer");
          if (r < 9) c.expect(rewards::combine(f / 9.0, a / 9.0, (r + 1) / 9.0, w) >= t, "not monotone in reasoning");
        }
      }
    }
  }
}

void criterion_8(Check& c) {
  std::array<int, 5> per_rule{};
  const auto deny = default_deny_list();
  for (const auto& k : testing::kClassifyCases) {
    ++per_rule[static_cast<std::size_t>(k.rule)];
    c.expect(classify_response(k.text, deny, true) == k.expected, std::string("classify case: ") + k.text);
  }
  c.expect(std::size(testing::kClassifyCases) == 20, "table must hold 20 cases");
  for (int rule = 1; rule <= 4; ++rule) c.expect(per_rule[rule] > 0, "rule " + std::to_string(rule) + " not covered");

  const auto samples = dataset::load(demo("dataset.jsonl"));
  auto backend = MockBackend::from_file(demo("candidate_fixtures.json"));
  EvaluationConfig cfg;
  cfg.model_name = "demo-candidate";
  cfg.concurrency = 4;
  const auto templates = TemplateStore::builtin();
  const auto a = evaluate_model(samples, cfg, *backend, templates);
  cfg.concurrency = 1;
  const auto b = evaluate_model(samples, cfg, *backend, templates);
  c.expect(a == b, "evaluate_model differs between runs");
  c.expect(a.size() == samples.size(), "one record per sample");
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = ::pclose(pipe);
  return out;
}

void criterion_9(Check& c) {
  int status = 0;
  testing::TempDir dir;
  const std::string cmd = std::string("'") + PF_CLI + "' score --predictions '" + demo("predictions.jsonl") +
                          "' --dataset '" + demo("dataset.jsonl") + "' --out '" + (dir / "report.json").string() +
                          "' --markdown --model-name demo-candidate 2>/dev/null";
  const auto out = run_command(cmd, status);
  c.expect(status == 0, "score exited with status " + std::to_string(status));
  const std::string header =
      "| Model | Perceptual FPC | Perceptual FPDP | Perceptual TPIR | Cognitive FPC | Cognitive FPDP | "
      "Cognitive TPIR | Reasoning FPC | Reasoning FPDP | Reasoning TPIR |";
  c.expect(out.find(header) != std::string::npos, "markdown header missing");
  const std::regex row(R"(\| demo-candidate((\s*\|\s*(\d+\.\d±\d\.\d\d|\d+\.\d|n/a)){9})\s*\|)");
  c.expect(std::regex_search(out, row), "no 9-cell model row");
  const std::regex cell(R"(\d+\.\d±\d\.\d\d)");
  c.expect(std::regex_search(out, cell), "no cell formatted like 75.9±0.04");
}

void criterion_10(Check& c) {
  testing::TempDir dir;
  std::mt19937_64 gen(10);
  std::vector<QuestionSample> xs;
  std::set<std::string> ids;
  while (xs.size() < 1000) {
    auto s = testing::random_sample(gen);
    if (ids.insert(s.sample_id).second) xs.push_back(std::move(s));
  }
  dataset::save(dir / "x.jsonl", xs);
  c.expect(dataset::load(dir / "x.jsonl") == xs, "load(save(x)) != x");

  const auto result = dataset::load_with_issues(std::string(PF_TEST_DATA) + "/corrupted.jsonl");
  const std::vector<std::pair<std::size_t, std::string>> expected = {
      {3, "label"},   {4, "embedded_premise"}, {6, "embedded_premise"}, {7, ""},
      {8, "subtype"}, {10, "level"},           {11, "question"},        {12, "generator_metadata"},
      {14, "score"},  {15, "sample_id"},       {16, "reference_answer"}, {17, "sample_id"}};
  c.expect(result.issues.size() == expected.size(),
           "expected 12 issues, got " + std::to_string(result.issues.size()));
  for (std::size_t i = 0; i < std::min(expected.size(), result.issues.size()); ++i) {
    c.expect(result.issues[i].line == expected[i].first && result.issues[i].field == expected[i].second,
             "issue " + std::to_string(i) + " at line " + std::to_string(result.issues[i].line));
  }
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"metric oracle equivalence", criterion_1},   {"hand-worked metric cases", criterion_2},
      {"advantage normalization", criterion_3},     {"objective composition", criterion_4},
      {"KL properties", criterion_5},               {"mock pipeline end to end", criterion_6},
      {"reward stack", criterion_7},                {"evaluator parsing and determinism", criterion_8},
      {"markdown report shape", criterion_9},       {"dataset round trip", criterion_10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = check.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first;
    for (const auto& f : check.failures) std::cout << " | " << f;
    std::cout << '\n';
  }
  return failed == 0 ? 0 : 1;
}
