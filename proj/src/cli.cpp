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

#include "premise_forge/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "premise_forge/config.hpp"
#include "premise_forge/dataset.hpp"
#include "premise_forge/errors.hpp"
#include "premise_forge/evaluator.hpp"
#include "premise_forge/grpo.hpp"
#include "premise_forge/metrics.hpp"
#include "premise_forge/parallel.hpp"
#include "premise_forge/pipeline.hpp"
#include "premise_forge/rewards.hpp"
#include "premise_forge/text.hpp"

namespace premise_forge::cli {
namespace {

using ojson = nlohmann::ordered_json;

// Thrown for input problems that should exit with kExitValidation.
class ValidationFailure : public Error {
 public:
  using Error::Error;
};

void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationFailure(std::string(what) + " not found: " + path);
  }
}

AppConfig load_config(const std::string& path) {
  if (path.empty()) return AppConfig{};
  require_file(path, "config");
  return AppConfig::load(path);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<double> parse_csv_doubles(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (text::trim(item.substr(used)).size() != 0) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationFailure(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != expected) {
    throw ValidationFailure(std::string(what) + " needs " + std::to_string(expected) + " values");
  }
  return out;
}

StageClient stage_client(const AppConfig& config, const std::string& role, double temperature) {
  const auto& spec = config.backend(role);
  StageClient c;
  c.backend = make_backend(spec);
  c.model_name = spec.model;
  c.temperature = temperature;
  if (spec.max_tokens) c.max_tokens = *spec.max_tokens;
  return c;
}

ImageResolver manifest_resolver(const std::optional<std::filesystem::path>& manifest) {
  if (!manifest) return {};
  require_file(manifest->string(), "image manifest");
  auto entries = read_manifest(*manifest);
  auto table = std::make_shared<std::map<std::string, std::string>>();
  for (auto& e : entries) table->emplace(e.image_id, e.location);
  return [table](const std::string& id) -> std::optional<std::string> {
    auto it = table->find(id);
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
}

// generate ----------------------------------------------------------------------

struct GenerateArgs {
  std::string manifest, config, out, report;
  bool with_answers = false;
};

ojson cmd_generate(const GenerateArgs& a) {
  require_file(a.manifest, "manifest");
  auto config = load_config(a.config);
  const auto manifest = read_manifest(a.manifest);
  if (manifest.empty()) throw ValidationFailure("manifest is empty: " + a.manifest);

  PipelineClients clients;
  clients.extractor = stage_client(config, "extractor", config.temperature_generation);
  clients.question = stage_client(config, "question", config.temperature_generation);
  if (config.has_backend("answer")) {
    clients.answer = stage_client(config, "answer", config.temperature_generation);
  }
  auto options = config.pipeline;
  options.with_answers = a.with_answers;
  options.concurrency = config.concurrency;

  PremisePipeline pipeline(std::move(clients), config.templates(), options);
  JsonlSampleSink sink(a.out);
  const auto report = pipeline.run(manifest, config.quotas, sink);
  if (!a.report.empty()) open_out(a.report) << report.to_json().dump(2) << "\n";

  const auto totals = report.totals();
  ojson summary;
  summary["samples"] = report.samples_written;
  summary["attempted"] = totals.attempted;
  summary["absent"] = totals.absent;
  summary["emitted_premises"] = totals.emitted;
  summary["errored"] = totals.errored;
  summary["out"] = a.out;
  return summary;
}

// split --------------------------------------------------------------------------

struct SplitArgs {
  std::string in, fractions, out_dir, config;
  std::optional<std::uint64_t> seed;
};

ojson cmd_split(const SplitArgs& a) {
  require_file(a.in, "dataset");
  const auto config = load_config(a.config);
  auto fractions = config.split_fractions;
  if (!a.fractions.empty()) {
    const auto f = parse_csv_doubles(a.fractions, 3, "--fractions");
    fractions = {f[0], f[1], f[2]};
  }
  const auto samples = dataset::load(a.in);
  const auto splits = dataset::split(samples, fractions, a.seed.value_or(config.split_seed));
  std::filesystem::create_directories(a.out_dir);
  ojson summary;
  for (const auto& s : splits) {
    const auto path = std::filesystem::path(a.out_dir) / (std::string(dataset::to_string(s.name)) + ".jsonl");
    dataset::save(path, s.samples);
    summary[std::string(dataset::to_string(s.name))] = s.samples.size();
  }
  summary["out_dir"] = a.out_dir;
  return summary;
}

// evaluate -----------------------------------------------------------------------

struct EvaluateArgs {
  std::string dataset, model_config, out, config, manifest;
};

ojson cmd_evaluate(const EvaluateArgs& a) {
  require_file(a.dataset, "dataset");
  require_file(a.model_config, "model config");
  auto config = load_config(a.config);
  config.merge_backend_file(a.model_config, "candidate");
  if (!a.manifest.empty()) config.image_manifest = a.manifest;
  config.validate();

  const auto samples = dataset::load(a.dataset);
  if (samples.empty()) throw ValidationFailure("dataset is empty: " + a.dataset);
  const auto& spec = config.backend("candidate");
  auto backend = make_backend(spec, config.evaluation_timeout_s);

  EvaluationConfig eval;
  eval.model_name = spec.model;
  eval.template_key = config.evaluation_template;
  eval.deny_list = config.deny_list;
  eval.fallback_parsing = config.fallback_parsing;
  eval.concurrency = config.concurrency;
  eval.call_timeout = std::chrono::seconds(config.evaluation_timeout_s);
  eval.temperature = config.temperature_evaluation;
  if (spec.max_tokens) eval.max_tokens = *spec.max_tokens;

  const auto predictions = evaluate_model(samples, eval, *backend, config.templates(),
                                          manifest_resolver(config.image_manifest));
  dataset::save_predictions(a.out, predictions);

  std::map<std::string, std::size_t> counts{{"false_premise", 0}, {"true_premise", 0}, {"unparseable", 0}};
  for (const auto& p : predictions) ++counts[std::string(to_string(p.predicted))];
  ojson summary;
  summary["predictions"] = predictions.size();
  for (const auto& [k, v] : counts) summary[k] = v;
  summary["out"] = a.out;
  return summary;
}

// score --------------------------------------------------------------------------

struct ScoreArgs {
  std::string predictions, dataset, out, config, model_name, markdown_out;
  std::vector<std::string> subtypes, levels;
  bool markdown = false;
  std::optional<std::size_t> resamples;
  std::optional<std::uint64_t> seed;
};

ojson cmd_score(const ScoreArgs& a, std::ostream& out) {
  require_file(a.predictions, "predictions");
  require_file(a.dataset, "dataset");
  const auto config = load_config(a.config);
  auto predictions = dataset::load_predictions(a.predictions);
  const auto samples = dataset::load(a.dataset);
  if (!a.subtypes.empty() || !a.levels.empty()) {
    std::vector<PremiseSubtype> keep_sub;
    std::vector<PremiseLevel> keep_lvl;
    for (const auto& s : a.subtypes) {
      auto v = parse_subtype(s);
      if (!v) throw ValidationFailure("unknown subtype '" + s + "'");
      keep_sub.push_back(*v);
    }
    for (const auto& l : a.levels) {
      auto v = parse_level(l);
      if (!v) throw ValidationFailure("unknown level '" + l + "'");
      keep_lvl.push_back(*v);
    }
    auto keep = [&](PremiseSubtype s) {
      const bool sub_ok = keep_sub.empty() || std::find(keep_sub.begin(), keep_sub.end(), s) != keep_sub.end();
      const bool lvl_ok =
          keep_lvl.empty() || std::find(keep_lvl.begin(), keep_lvl.end(), level_of(s)) != keep_lvl.end();
      return sub_ok && lvl_ok;
    };
    std::erase_if(predictions, [&](const PredictionRecord& p) { return !keep(p.subtype); });
  }
  if (predictions.empty()) throw ValidationFailure("no predictions to score in " + a.predictions);

  metrics::BreakdownOptions options;
  options.resamples = a.resamples.value_or(config.bootstrap_resamples);
  options.seed = a.seed.value_or(config.bootstrap_seed);
  options.threads = config.concurrency;
  const auto reports = metrics::compute_breakdown(predictions, samples, options);

  const std::string model =
      a.model_name.empty() ? std::filesystem::path(a.predictions).stem().string() : a.model_name;
  open_out(a.out) << metrics::breakdown_to_json(reports, model).dump(2) << "\n";
  if (a.markdown || !a.markdown_out.empty()) {
    const auto md = metrics::render_markdown(reports, model);
    if (!a.markdown_out.empty()) open_out(a.markdown_out) << md;
    if (a.markdown) out << md << "\n";
  }
  const auto& overall = reports.front();
  ojson summary;
  summary["n"] = overall.n;
  summary["fpc"] = overall.fpc;
  summary["fpdp"] = overall.fpdp ? ojson(*overall.fpdp) : ojson(nullptr);
  summary["tpir"] = overall.tpir ? ojson(*overall.tpir) : ojson(nullptr);
  summary["out"] = a.out;
  return summary;
}

// reward -------------------------------------------------------------------------

struct RewardArgs {
  std::string completions, dataset, judge_config, out, config, weights;
};

ojson cmd_reward(const RewardArgs& a) {
  require_file(a.completions, "completions");
  require_file(a.dataset, "dataset");
  require_file(a.judge_config, "judge config");
  auto config = load_config(a.config);
  config.merge_backend_file(a.judge_config, "judge");
  if (!a.weights.empty()) {
    const auto w = parse_csv_doubles(a.weights, 3, "--weights");
    config.reward_weights = {w[0], w[1], w[2]};
  }
  config.validate();

  const auto samples = dataset::load(a.dataset);
  std::map<std::string, const QuestionSample*, std::less<>> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);

  struct Item {
    const QuestionSample* sample;
    std::string completion;
    std::size_t candidate;
  };
  std::vector<Item> items;
  {
    std::ifstream in(a.completions);
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(lineno, e.what());
      }
      if (!j.is_object() || !j.contains("sample_id") || !j.contains("completion") ||
          !j["sample_id"].is_string() || !j["completion"].is_string()) {
        throw InvariantViolation(lineno, "<record>", "needs string fields sample_id and completion");
      }
      const auto id = j["sample_id"].get<std::string>();
      auto it = by_id.find(id);
      if (it == by_id.end()) throw UnknownSampleId(id);
      items.push_back({it->second, j["completion"].get<std::string>(), seen[id]++});
    }
  }

  const auto& spec = config.backend("judge");
  auto backend = make_backend(spec);
  rewards::JudgeClient judge;
  judge.backend = backend.get();
  judge.model_name = spec.model;
  judge.temperature = config.temperature_judge;
  if (spec.max_tokens) judge.max_tokens = *spec.max_tokens;
  const auto templates = config.templates();

  auto results = parallel_map(items.size(), config.concurrency, [&](std::size_t i) {
    const auto& item = items[i];
    return rewards::total_reward(rewards::Completion(item.completion), item.sample->label,
                                 item.sample->question, judge, templates, config.reward_weights,
                                 item.sample->sample_id + ":" + std::to_string(item.candidate));
  });

  auto out = open_out(a.out);
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!results[i].ok()) std::rethrow_exception(results[i].error);
    ojson line;
    line["sample_id"] = items[i].sample->sample_id;
    line["candidate"] = items[i].candidate;
    const auto breakdown = rewards::to_json(*results[i].value);
    for (const auto& [k, v] : breakdown.items()) line[k] = v;
    out << line.dump(-1, ' ', false, ojson::error_handler_t::replace) << "\n";
    total += results[i].value->total;
  }
  ojson summary;
  summary["completions"] = items.size();
  summary["mean_total"] = items.empty() ? 0.0 : total / static_cast<double>(items.size());
  summary["out"] = a.out;
  return summary;
}

// grpo-check ---------------------------------------------------------------------

grpo::CandidateGroup parse_group(const nlohmann::json& j, std::size_t index) {
  auto where = "group " + std::to_string(index);
  if (!j.is_object()) throw ValidationFailure(where + " must be an object");
  auto vec = [&](const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) throw ValidationFailure(where + " is missing '" + key + "'");
      return std::vector<double>{};
    }
    try {
      return j.at(key).get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ValidationFailure(where + ": '" + std::string(key) + "' must be an array of numbers");
    }
  };
  grpo::CandidateGroup g;
  g.rewards = vec("rewards", true);
  g.logp_current = vec("logp_current", true);
  g.logp_old = vec("logp_old", true);
  g.logp_ref = vec("logp_ref", false);
  if (j.contains("distributions")) {
    for (const auto& d : j.at("distributions")) {
      try {
        g.distributions.push_back({d.at("current").get<std::vector<double>>(),
                                   d.at("reference").get<std::vector<double>>()});
      } catch (const nlohmann::json::exception&) {
        throw ValidationFailure(where + ": distributions entries need 'current' and 'reference' arrays");
      }
    }
  }
  return g;
}

ojson cmd_grpo_check(const std::string& groups_path, double beta, std::ostream& out) {
  require_file(groups_path, "groups file");
  nlohmann::json j;
  {
    std::ifstream in(groups_path);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationFailure("invalid JSON in " + groups_path + ": " + e.what());
    }
  }
  const auto& arr = j.is_object() && j.contains("groups") ? j.at("groups") : j;
  if (!arr.is_array()) throw ValidationFailure("groups file must hold an array of groups");
  std::vector<double> objectives;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto group = parse_group(arr[i], i);
    const auto r = grpo::analyze_group(group, beta);
    ojson line;
    line["group"] = i;
    if (arr[i].contains("name")) line["name"] = arr[i]["name"];
    line["advantages"] = r.advantages;
    line["ratios"] = r.ratios;
    line["aggregate_reward"] = r.aggregate;
    line["kl"] = r.kl ? ojson(*r.kl) : ojson(nullptr);
    line["kl_method"] = group.has_distributions() ? "exact" : group.has_reference_logps() ? "k3" : "none";
    line["objective"] = r.objective;
    out << line.dump() << "\n";
    objectives.push_back(r.objective);
  }
  ojson summary;
  summary["groups"] = objectives.size();
  summary["beta"] = beta;
  summary["objectives"] = objectives;
  return summary;
}

void print_summary(std::ostream& out, const std::string& command, int code, ojson fields,
                   const std::string& error = {}) {
  ojson s;
  s["command"] = command;
  s["status"] = code == kExitOk ? "ok" : "error";
  s["exit_code"] = code;
  if (!error.empty()) s["error"] = error;
  for (auto& [k, v] : fields.items()) s[k] = v;
  out << s.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"premise-forge: build, evaluate and score false-premise VQA datasets"};
  app.name("premise-forge");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Shared JSON configuration file");
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Run the construction pipeline over an image manifest");
  generate->add_option("--manifest", gen.manifest, "image_id<TAB>path-or-url per line")->required();
  generate->add_option("--out", gen.out, "Output JSONL")->required();
  generate->add_option("--report", gen.report, "Optional pipeline report JSON");
  generate->add_flag("--with-answers", gen.with_answers, "Also generate reference answers");
  generate->add_option("--config", config_path, "Shared JSON configuration file");

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "Stratified eval/sft/rl split");
  split->add_option("--in", sp.in, "Dataset JSONL")->required();
  split->add_option("--fractions", sp.fractions, "eval,sft,rl (default from config: 0.5,0.25,0.25)");
  split->add_option("--seed", sp.seed, "Shuffle seed");
  split->add_option("--out-dir", sp.out_dir, "Directory for eval.jsonl, sft.jsonl, rl.jsonl")->required();
  split->add_option("--config", config_path, "Shared JSON configuration file");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Query a candidate model on a dataset split");
  evaluate->add_option("--dataset", ev.dataset, "Dataset JSONL")->required();
  evaluate->add_option("--model-config", ev.model_config, "Candidate backend config")->required();
  evaluate->add_option("--out", ev.out, "Predictions JSONL")->required();
  evaluate->add_option("--manifest", ev.manifest, "Image manifest (overrides config)");
  evaluate->add_option("--config", config_path, "Shared JSON configuration file");

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "FPC/FPDP/TPIR with per-level and per-subtype breakdown");
  score->add_option("--predictions", sc.predictions, "Predictions JSONL")->required();
  score->add_option("--dataset", sc.dataset, "Dataset JSONL")->required();
  score->add_option("--out", sc.out, "Report JSON")->required();
  score->add_flag("--markdown", sc.markdown, "Print the results grid as markdown");
  score->add_option("--markdown-out", sc.markdown_out, "Also write the markdown grid to a file");
  score->add_option("--model-name", sc.model_name, "Row label (default: predictions file stem)");
  score->add_option("--resamples", sc.resamples, "Bootstrap resamples (default 1000)");
  score->add_option("--seed", sc.seed, "Bootstrap seed");
  score->add_option("--subtype", sc.subtypes, "Only score these subtypes (snake_case, repeatable)");
  score->add_option("--level", sc.levels, "Only score these levels (repeatable)");
  score->add_option("--config", config_path, "Shared JSON configuration file");

  RewardArgs rw;
  auto* reward = app.add_subcommand("reward", "Format, answer and judged reasoning rewards");
  reward->add_option("--completions", rw.completions, "JSONL of {sample_id, completion}")->required();
  reward->add_option("--dataset", rw.dataset, "Dataset JSONL")->required();
  reward->add_option("--judge-config", rw.judge_config, "Judge backend config")->required();
  reward->add_option("--out", rw.out, "Rewards JSONL")->required();
  reward->add_option("--weights", rw.weights, "format,answer,reasoning weights");
  reward->add_option("--config", config_path, "Shared JSON configuration file");

  std::string groups_path;
  double beta = 0.0;
  auto* grpo_check = app.add_subcommand("grpo-check", "Advantages, ratios, KL and objective per group");
  grpo_check->add_option("--groups", groups_path, "Groups JSON")->required();
  grpo_check->add_option("--beta", beta, "KL coefficient")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e, out, err);
      return kExitOk;
    }
    std::string message = e.what();
    const auto first = std::find_if(args.begin(), args.end(), [](const std::string& a) {
      return !a.empty() && a.front() != '-';
    });
    const bool positional = first != args.end() &&
        (first == args.begin() || (*(first - 1) != "--config" && *(first - 1) != "--log-level"));
    CLI::App* sub = positional ? app.get_subcommand_no_throw(*first) : nullptr;
    if (positional && sub == nullptr) message = "unknown subcommand '" + *first + "'";
    err << "error: " << message << "\n\n" << (sub != nullptr ? sub->help() : app.help());
    print_summary(out, sub != nullptr ? sub->get_name() : "", kExitValidation, ojson::object(), message);
    return kExitValidation;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  const std::string command = app.get_subcommands().front()->get_name();
  sp.config = config_path;
  gen.config = config_path;
  ev.config = config_path;
  sc.config = config_path;
  rw.config = config_path;

  try {
    ojson summary;
    if (command == "generate") summary = cmd_generate(gen);
    else if (command == "split") summary = cmd_split(sp);
    else if (command == "evaluate") summary = cmd_evaluate(ev);
    else if (command == "score") summary = cmd_score(sc, out);
    else if (command == "reward") summary = cmd_reward(rw);
    else summary = cmd_grpo_check(groups_path, beta, out);
    print_summary(out, command, kExitOk, std::move(summary));
    return kExitOk;
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitValidation, ojson::object(), e.what());
    return kExitValidation;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitValidation, ojson::object(), e.what());
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitValidation, ojson::object(), e.what());
    return kExitValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitValidation, ojson::object(), e.what());
    return kExitValidation;
  } catch (const InvariantViolation& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitValidation, ojson::object(), e.what());
    return kExitValidation;
  } catch (const UnknownSampleId& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitValidation, ojson::object(), e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    print_summary(out, command, kExitRuntime, ojson::object(), e.what());
    return kExitRuntime;
  }
}

}  // namespace premise_forge::cli
